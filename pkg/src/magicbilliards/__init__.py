"""Magic billiards in an ellipse and in a confocal elliptic annulus.

A *magic* billiard reflects off the wall and then teleports along a
boundary symmetry (flip over an axis, or a half turn).  The package
simulates these systems, certifies periodic caustics three independent
ways (Hankel determinants of a square-root series, torsion on a cubic
curve, polynomial Pell identities), and classifies the topology of the
level sets (component counts, singular-level atoms, Fomenko graphs).

Squared semi-axes convention throughout: the outer boundary is
x^2/a + y^2/b = 1 with a > b > 0, and the confocal family is indexed by
lambda with 0 <= lambda <= a.
"""

from .certificates import (
    CayleyMarker,
    CertificateBundle,
    CurvePoint,
    DegenerateCubic,
    DegenerateFocal,
    INFINITY,
    PellPair,
    PowerSeries,
    UnsupportedParity,
    cayley_det,
    ec_add,
    ec_neg,
    find_periodic_caustics,
    pell_solve,
    rotation_number,
    series_divide_linear,
    series_sqrt_cubic,
    torsion_check,
)
from .cli import RunConfig, cmd_periodic, cmd_simulate, cmd_topology, main
from .dynamics import (
    BoundaryPhase,
    ClosureReport,
    Crossings,
    MagicKind,
    TableSpec,
    TangentGraze,
    Trajectory,
    apply_magic,
    closure_defect,
    detect_closure,
    phase_at,
    phase_distance,
    reflect_standard,
    step,
    step_inverse,
    trajectory,
)
from .geometry import (
    CausticId,
    CenterDegenerate,
    ConfocalFamily,
    EllipticCoords,
    NoForwardHit,
    NotOnConic,
    caustic_of_line,
    classify_caustic,
    from_elliptic,
    normal_at,
    ray_boundary_hit,
    tangent_directions,
    to_elliptic,
)
from .topology import (
    DegenerateLevel,
    FomenkoGraph,
    GraphAtom,
    GraphEdge,
    LevelSetReport,
    SingularReport,
    TopologyMismatch,
    UnknownSystem,
    classify_level,
    fomenko_graph,
    singular_level_report,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryPhase",
    "CausticId",
    "CayleyMarker",
    "CenterDegenerate",
    "CertificateBundle",
    "ClosureReport",
    "ConfocalFamily",
    "Crossings",
    "CurvePoint",
    "DegenerateCubic",
    "DegenerateFocal",
    "DegenerateLevel",
    "EllipticCoords",
    "FomenkoGraph",
    "GraphAtom",
    "GraphEdge",
    "INFINITY",
    "LevelSetReport",
    "MagicKind",
    "NoForwardHit",
    "NotOnConic",
    "PellPair",
    "PowerSeries",
    "RunConfig",
    "SingularReport",
    "TableSpec",
    "TangentGraze",
    "TopologyMismatch",
    "Trajectory",
    "UnknownSystem",
    "UnsupportedParity",
    "apply_magic",
    "caustic_of_line",
    "cayley_det",
    "classify_caustic",
    "classify_level",
    "closure_defect",
    "cmd_periodic",
    "cmd_simulate",
    "cmd_topology",
    "detect_closure",
    "ec_add",
    "ec_neg",
    "find_periodic_caustics",
    "fomenko_graph",
    "from_elliptic",
    "main",
    "normal_at",
    "pell_solve",
    "phase_at",
    "phase_distance",
    "ray_boundary_hit",
    "reflect_standard",
    "rotation_number",
    "series_divide_linear",
    "series_sqrt_cubic",
    "singular_level_report",
    "step",
    "step_inverse",
    "tangent_directions",
    "to_elliptic",
    "torsion_check",
    "trajectory",
]
