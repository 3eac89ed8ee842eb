"""Numerical topology of the caustic foliation of magic billiards.

Regular caustic levels are unions of tori; this module counts their
connected components by tagging simulated trajectories with coarse
discrete labels (winding sense for ellipse caustics; vertical direction,
hyperbola branch, and axis side for hyperbola caustics) and merging
labels that occur on a single trajectory.  Singular levels (caustic
parameter 0, b, or a) are described by counting their closed orbits and
separatrix families, which picks out one of the complexity-one atoms
A, B, A**, C2.  Finally, each studied system carries a small static
graph — atoms joined along torus families, decorated with the marks
(r, eps, n) transcribed from figure data — which is cross-checked
against the numeric reports whenever it is constructed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .dynamics import (
    BoundaryPhase,
    MagicKind,
    TableSpec,
    _propagate,
    apply_magic,
    phase_distance,
    step,
    step_inverse,
)
from .geometry import ConfocalFamily, _ray_conic_roots, tangent_directions

# sliding-window length (in segments) and minimum swept angle for a
# winding label; windows sweeping less stay Indeterminate
WINDING_WINDOW = 32
WINDING_MIN_SWEEP = math.pi / 8
# angular offset of the separatrix seeds from the long-axis vertices
SEP_SEED_OFFSET = 1e-4
# how many segments a focal trajectory stays resolvable before the
# focus-line test degenerates in double precision
SEP_MAX_SEGMENTS = 14
DEGEN_RTOL = 1e-9

_ATOM_LOOKUP = {
    (1, 0): "A",
    (2, 0): "A,A",
    (1, 2): "B",
    (2, 2): "A**",
    (2, 4): "C2",
}


class DegenerateLevel(ValueError):
    """The requested caustic level is singular (or empty for this table)."""


class UnknownSystem(ValueError):
    """No transcribed Fomenko graph exists for this table/map combination."""


class TopologyMismatch(RuntimeError):
    """Numeric level reports contradict the transcribed graph data."""


@dataclass(frozen=True)
class LevelSetReport:
    beta: float
    kind: str
    component_count: int
    sample_count: int
    merge_evidence: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class SingularReport:
    level: float
    closed_orbits: int
    separatrices: int
    atom: str


@dataclass(frozen=True)
class GraphAtom:
    id: str
    type: str
    level: str  # "0" | "b" | "a"


@dataclass(frozen=True)
class GraphEdge:
    src: str
    dst: str
    r: str | None  # rational as a string, "inf", or None when unavailable
    eps: int | None


@dataclass(frozen=True)
class FomenkoGraph:
    system: str
    atoms: tuple[GraphAtom, ...]
    edges: tuple[GraphEdge, ...]
    family_mark: int | None
    provenance: str

    @property
    def singular_levels(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, tuple[str, ...]] = {"0": (), "b": (), "a": ()}
        for atom in self.atoms:
            out[atom.level] = out[atom.level] + (atom.id,)
        return out

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "atoms": [{"id": x.id, "type": x.type} for x in self.atoms],
            "edges": [
                {"from": e.src, "to": e.dst, "r": e.r, "eps": e.eps}
                for e in self.edges
            ],
            "n": self.family_mark,
            "singular_levels": {k: list(v) for k, v in self.singular_levels.items()},
            "provenance": self.provenance,
        }


# ---------------------------------------------------------------------------
# seeding


def _tangent_seeds(table: TableSpec, beta: float, samples: int) -> list[BoundaryPhase]:
    """Phases tangent to C_beta, spread over the outer boundary and both branches.

    Hyperbola caustics are reachable only from part of the boundary, so
    the scan oversamples the boundary parameter, then thins the
    admissible points to ``samples`` evenly spaced entries, alternating
    the tangent branch from seed to seed.
    """
    fam = table.fam
    scan = 8 * samples
    hits: list[tuple[tuple[float, float], tuple]] = []
    for k in range(scan):
        t = 2.0 * math.pi * (k + 0.37) / scan
        p = fam.boundary_point(t)
        dirs = tangent_directions(fam, beta, p)
        if dirs:
            hits.append((p, dirs))
    if not hits:
        return []
    stride = len(hits) / samples
    seeds: list[BoundaryPhase] = []
    for i in range(samples):
        p, dirs = hits[min(int(i * stride), len(hits) - 1)]
        seeds.append(BoundaryPhase(p, dirs[i % len(dirs)]))
    return seeds


# ---------------------------------------------------------------------------
# regular levels


def _wrap(d: float) -> float:
    while d > math.pi:
        d -= 2.0 * math.pi
    while d < -math.pi:
        d += 2.0 * math.pi
    return d


def _winding_signature(table: TableSpec, s0: BoundaryPhase, steps: int) -> set[str]:
    """Winding labels {CW, CCW} observed along one ellipse-caustic trajectory.

    The polar angle of the impact points is accumulated over sliding
    windows of WINDING_WINDOW segments; a window sweeping less than
    WINDING_MIN_SWEEP is indeterminate and contributes no label.
    """
    inc: list[float] = []
    prev = math.atan2(s0.at[1], s0.at[0])
    s = s0
    for _ in range(steps):
        s = step(table, s)
        th = math.atan2(s.at[1], s.at[0])
        inc.append(_wrap(th - prev))
        prev = th
    labels: set[str] = set()
    acc = 0.0
    for i, d in enumerate(inc):
        acc += d
        if i >= WINDING_WINDOW:
            acc -= inc[i - WINDING_WINDOW]
            if acc > WINDING_MIN_SWEEP:
                labels.add("CCW")
            elif acc < -WINDING_MIN_SWEEP:
                labels.add("CW")
    return labels


def _hyperbola_label(
    fam: ConfocalFamily,
    beta: float,
    p: tuple[float, float],
    v: tuple[float, float],
    q: tuple[float, float],
) -> str | None:
    """Label of one segment tangent to a hyperbola caustic, or None.

    Combines the vertical direction (U/D), the branch touched (L/R, by
    the sign of the tangency point's x), and the long-axis side of the
    segment (T/B, or X when the segment crosses the axis).
    """
    if abs(v[1]) < 1e-9:
        return None
    ud = "U" if v[1] > 0.0 else "D"
    roots = _ray_conic_roots(fam, beta, p, v)
    if roots is None:
        return None
    alpha, gamma, _ = roots
    xstar = p[0] - (gamma / alpha) * v[0]
    if abs(xstar) < 1e-9:
        return None
    lr = "R" if xstar > 0.0 else "L"
    if p[1] > 0.0 and q[1] > 0.0:
        side = "T"
    elif p[1] < 0.0 and q[1] < 0.0:
        side = "B"
    elif p[1] * q[1] < 0.0:
        side = "X"
    else:
        return None
    return ud + lr + side


def _hyperbola_signature(
    table: TableSpec, s0: BoundaryPhase, steps: int, beta: float
) -> set[str]:
    labels: set[str] = set()
    s = s0
    for _ in range(steps):
        hit, v_out, comp = _propagate(table, s)
        lab = _hyperbola_label(table.fam, beta, s.at, s.v, hit)
        if lab is not None:
            labels.add(lab)
        if comp == "outer":
            hit, v_out = apply_magic(table.outer_map, hit, v_out)
        s = BoundaryPhase(hit, v_out, comp)
    return labels


def _merge_count(signatures: list[set[str]]) -> tuple[int, list[tuple[str, str]]]:
    """Union-find over labels: labels co-occurring on one trajectory merge."""
    parent: dict[str, str] = {}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    evidence: list[tuple[str, str]] = []
    seen: set[tuple[str, str]] = set()
    for sig in signatures:
        labs = sorted(sig)
        for lab in labs:
            parent.setdefault(lab, lab)
        for other in labs[1:]:
            ra, rb = find(labs[0]), find(other)
            if ra != rb:
                parent[rb] = ra
            pair = (labs[0], other)
            if pair not in seen:
                seen.add(pair)
                evidence.append(pair)
    classes = {find(lab) for lab in parent}
    return (len(classes) if classes else 1), evidence


def classify_level(
    table: TableSpec, beta: float, samples: int = 64, steps: int = 1000
) -> LevelSetReport:
    """Number of connected components of the regular level at caustic beta.

    Seeds ``samples`` tangent phases, simulates ``steps`` bounces each,
    and merges the discrete labels observed on a common trajectory; the
    component count is the number of remaining label classes (1 when
    every trajectory stays indeterminate).
    """
    fam = table.fam
    if samples < 16:
        raise ValueError("need samples >= 16")
    if not (0.0 < beta < fam.a):
        raise ValueError(f"caustic parameter {beta} outside (0, {fam.a})")
    tol = DEGEN_RTOL * fam.a
    if min(abs(beta), abs(beta - fam.b), abs(beta - fam.a)) < tol:
        raise DegenerateLevel(f"beta={beta} is a singular level")
    if table.inner_lam is not None and table.inner_lam - tol <= beta < fam.b:
        raise DegenerateLevel(
            f"beta={beta}: ellipse caustics inside the inner wall carry no annulus trajectories"
        )
    kind = "ellipse" if beta < fam.b else "hyperbola"
    seeds = _tangent_seeds(table, beta, samples)
    signatures = []
    for s0 in seeds:
        if kind == "ellipse":
            signatures.append(_winding_signature(table, s0, steps))
        else:
            signatures.append(_hyperbola_signature(table, s0, steps, beta))
    count, evidence = _merge_count([sig for sig in signatures if sig])
    return LevelSetReport(beta, kind, count, len(seeds), tuple(evidence))


# ---------------------------------------------------------------------------
# singular levels


def _state_key(s: BoundaryPhase) -> tuple:
    return (
        round(s.at[0], 9),
        round(s.at[1], 9),
        round(s.v[0], 9),
        round(s.v[1], 9),
        s.component,
    )


def _cycle_count(table: TableSpec, seeds: list[BoundaryPhase], max_period: int = 8) -> int:
    """Distinct phase cycles through the given (exactly periodic) seeds."""
    tol = 1e-9 * math.sqrt(table.fam.a)
    cycles: list[set[tuple]] = []
    for s0 in seeds:
        k0 = _state_key(s0)
        if any(k0 in c for c in cycles):
            continue
        visited = {k0}
        s = s0
        for _ in range(max_period):
            s = step(table, s)
            if phase_distance(table.fam, s, s0) < tol:
                break
            visited.add(_state_key(s))
        cycles.append(visited)
    return len(cycles)


def _sep_label(table: TableSpec, s: BoundaryPhase) -> str | None:
    """Asymptotic label of one near-focal segment, or None once unresolvable.

    The segment's line should pass very near exactly one focus; the
    label combines which focus (F1/F2), the vertical direction (U/D),
    and the long-axis side of the segment (T/B/X).  The focus test is a
    ratio test on the two point-line distances so it keeps working while
    the trajectory converges toward the axis.
    """
    fam = table.fam
    c = fam.focal_distance
    px, py = s.at
    vx, vy = s.v
    d1 = abs((c - px) * vy + py * vx)
    d2 = abs((-c - px) * vy + py * vx)
    lo, hi = sorted((d1, d2))
    if lo > 3e-5 or hi < 10.0 * lo + 1e-13:
        return None
    foc = "F1" if d1 < d2 else "F2"
    if abs(vy) < 1e-9:
        return None
    ud = "U" if vy > 0.0 else "D"
    q = _propagate(table, s)[0]
    if py > 0.0 and q[1] > 0.0:
        side = "T"
    elif py < 0.0 and q[1] < 0.0:
        side = "B"
    elif py * q[1] < 0.0:
        side = "X"
    else:
        return None
    return f"{foc}-{ud}{side}"


def _sep_signature(table: TableSpec, s0: BoundaryPhase) -> tuple[frozenset, frozenset]:
    """(forward, backward) label sets of one focal trajectory."""
    fwd: set[str] = set()
    s = s0
    for _ in range(SEP_MAX_SEGMENTS):
        lab = _sep_label(table, s)
        if lab is None:
            break
        fwd.add(lab)
        s = step(table, s)
    bwd: set[str] = set()
    s = s0
    for _ in range(SEP_MAX_SEGMENTS):
        s = step_inverse(table, s)
        lab = _sep_label(table, s)
        if lab is None:
            break
        bwd.add(lab)
    return frozenset(fwd), frozenset(bwd)


def _separatrix_count(table: TableSpec) -> int:
    """Distinct separatrix families on the focal level lambda = b.

    Eight seeds just off the long-axis vertices, aimed at each focus,
    cover every family; families are told apart by the (forward,
    backward) asymptotic label sets.
    """
    fam = table.fam
    eps = SEP_SEED_OFFSET
    c = fam.focal_distance
    signatures = set()
    for t in (eps, math.pi - eps, math.pi + eps, 2.0 * math.pi - eps):
        p = fam.boundary_point(t)
        for fx in (c, -c):
            dx, dy = fx - p[0], -p[1]
            h = math.hypot(dx, dy)
            s0 = BoundaryPhase(p, (dx / h, dy / h))
            signatures.add(_sep_signature(table, s0))
    return len(signatures)


def singular_level_report(table: TableSpec, which: float) -> SingularReport:
    """Closed-orbit and separatrix counts (and the atom) of a singular level.

    ``which`` must be one of the three singular parameters {0, b, a}.
    Closed orbits are counted by launching the canonical orbits of the
    level — boundary slides for 0, long-axis segments for b, short-axis
    segments for a — and counting distinct phase cycles under the magic
    map.  Separatrices exist only on the focal level b.
    """
    fam = table.fam
    tol = DEGEN_RTOL * fam.a
    sa, sb = math.sqrt(fam.a), math.sqrt(fam.b)

    if abs(which) < tol:
        # boundary slides: one orbit per winding sense; an
        # orientation-reversing magic map swaps the two senses
        closed = 1 if table.outer_map.orientation_reversing else 2
        seps = 0
    elif abs(which - fam.b) < tol:
        seeds = [
            BoundaryPhase((sa, 0.0), (-1.0, 0.0)),
            BoundaryPhase((-sa, 0.0), (1.0, 0.0)),
        ]
        closed = _cycle_count(table, seeds)
        seps = _separatrix_count(table)
    elif abs(which - fam.a) < tol:
        seeds = [
            BoundaryPhase((0.0, sb), (0.0, -1.0)),
            BoundaryPhase((0.0, -sb), (0.0, 1.0)),
        ]
        closed = _cycle_count(table, seeds)
        seps = 0
    else:
        raise ValueError(f"{which} is not a singular level of the family")

    atom = _ATOM_LOOKUP.get((closed, seps))
    if atom is None:
        raise TopologyMismatch(
            f"level {which}: ({closed} closed, {seps} separatrices) matches no known atom"
        )
    return SingularReport(which, closed, seps, atom)


# ---------------------------------------------------------------------------
# Fomenko graphs (static transcribed data, cross-checked numerically)

_PROV = "transcribed figure data"
_PROV_NO_MARKS = "transcribed figure data; marks unavailable"

# (shape, kind) -> (atom rows, edge rows, family mark, provenance)
_GRAPH_DATA: dict[tuple[str, MagicKind], tuple] = {
    ("ellipse", MagicKind.FLIP_LONG): (
        [("t1", "A", "0"), ("c", "B", "b"), ("t2", "A", "a"), ("t3", "A", "a")],
        [("c", "t1", "0", 1), ("c", "t2", "1/2", 1), ("c", "t3", "1/2", 1)],
        -2,
        _PROV,
    ),
    ("ellipse", MagicKind.FLIP_SHORT): (
        [("t1", "A", "0"), ("c", "A**", "b"), ("t2", "A", "a")],
        [("c", "t1", "0", 1), ("c", "t2", "0", 1)],
        0,
        _PROV,
    ),
    ("ellipse", MagicKind.HALF_TURN): (
        [
            ("t1", "A", "0"),
            ("t2", "A", "0"),
            ("c", "C2", "b"),
            ("t3", "A", "a"),
            ("t4", "A", "a"),
        ],
        [
            ("c", "t1", "0", 1),
            ("c", "t2", "0", 1),
            ("c", "t3", "0", 1),
            ("c", "t4", "0", 1),
        ],
        -4,
        _PROV,
    ),
    ("annulus", MagicKind.FLIP_LONG): (
        [("t1", "A", "0"), ("c", "A**", "b"), ("t2", "A", "a")],
        [("c", "t1", None, None), ("c", "t2", None, None)],
        None,
        _PROV_NO_MARKS,
    ),
    ("annulus", MagicKind.FLIP_SHORT): (
        [("t1", "A", "0"), ("c", "B", "b"), ("t2", "A", "a"), ("t3", "A", "a")],
        [("c", "t1", None, None), ("c", "t2", None, None), ("c", "t3", None, None)],
        None,
        _PROV_NO_MARKS,
    ),
    ("annulus", MagicKind.HALF_TURN): (
        [("t1", "A", "0"), ("t2", "A", "0"), ("c", "B", "b"), ("t3", "A", "a")],
        [("c", "t1", "1/2", 1), ("c", "t2", "1/2", 1), ("c", "t3", "inf", 1)],
        None,
        _PROV,
    ),
}


def _cross_check(table: TableSpec, atoms: list[GraphAtom], edges: list[GraphEdge]) -> None:
    """Fail loudly when numeric reports contradict the transcribed graph."""
    fam = table.fam
    by_level: dict[str, list[GraphAtom]] = {"0": [], "b": [], "a": []}
    for atom in atoms:
        by_level[atom.level].append(atom)
    center = by_level["b"][0]

    # closed-orbit counts at the torus ends must match the atom counts
    for level, lam in (("0", 0.0), ("a", fam.a)):
        rep = singular_level_report(table, lam)
        if rep.closed_orbits != len(by_level[level]):
            raise TopologyMismatch(
                f"level {level}: {rep.closed_orbits} closed orbits vs "
                f"{len(by_level[level])} transcribed atoms"
            )
    # the focal atom itself
    rep_b = singular_level_report(table, fam.b)
    if rep_b.atom != center.type:
        raise TopologyMismatch(
            f"focal level: numeric atom {rep_b.atom} vs transcribed {center.type}"
        )
    # regular component counts on each side must match the edge counts
    ids_e = {x.id for x in by_level["0"]}
    ids_h = {x.id for x in by_level["a"]}
    n_edges_e = sum(1 for e in edges if e.dst in ids_e or e.src in ids_e)
    n_edges_h = sum(1 for e in edges if e.dst in ids_h or e.src in ids_h)
    beta_e = (5.0 / 6.0) * table.inner_lam if table.inner_lam else 0.625 * fam.b
    beta_h = fam.b + 0.4 * (fam.a - fam.b)
    for beta, expected, side in ((beta_e, n_edges_e, "ellipse"), (beta_h, n_edges_h, "hyperbola")):
        got = classify_level(table, beta, samples=16, steps=400).component_count
        if got != expected:
            raise TopologyMismatch(
                f"{side}-caustic components: measured {got} vs {expected} transcribed edges"
            )


def fomenko_graph(table: TableSpec) -> FomenkoGraph:
    """The transcribed Fomenko graph of one of the six studied systems.

    The atoms, edges, and marks are static figure data; construction
    re-derives the checkable part (atom types, closed-orbit counts,
    component counts) numerically and raises TopologyMismatch on any
    disagreement.  The numeric marks (r, eps, n) themselves are data,
    not computation: deriving them needs admissible-coordinate
    machinery far beyond simulation.
    """
    key = (table.shape, table.outer_map)
    if key not in _GRAPH_DATA:
        raise UnknownSystem(
            f"no transcribed graph for {table.shape} with {table.outer_map.value}"
        )
    atom_rows, edge_rows, mark, prov = _GRAPH_DATA[key]
    atoms = [GraphAtom(*row) for row in atom_rows]
    edges = [GraphEdge(*row) for row in edge_rows]
    _cross_check(table, atoms, edges)
    name = f"{table.shape}:{table.outer_map.value}"
    return FomenkoGraph(name, tuple(atoms), tuple(edges), mark, prov)
