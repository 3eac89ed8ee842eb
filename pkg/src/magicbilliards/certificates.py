"""Algebraic periodicity certificates for magic billiards, cross-validated.

Three independent certificates decide whether the trajectories tangent to
a confocal caustic C_beta close up after n reflections:

* a Hankel-type determinant in the Taylor coefficients of
  sqrt((a-x)(b-x)(beta-x)) (and of that series divided by (b-x)),
* a torsion condition [n]Q0 = O on the cubic curve y^2 = (a-x)(b-x)(beta-x),
* a polynomial Pell equation p^2 - s(s-1/a)(s-1/b)(s-1/beta) q^2 = 1
  (with folded variants for the odd-period magic systems).

Which parities admit a certificate depends on the magic kind:

    kind         even n            odd n
    identity     Hankel in B       (no certificate in scope)
    flip-long    Hankel in B       Hankel in C, hyperbola caustics only
    flip-short   Hankel in B       never periodic
    half-turn    Hankel in B       Hankel in B, shifted index

``find_periodic_caustics`` ties everything together: it locates
determinant roots and fills in the torsion, Pell, and direct-simulation
residuals so each certificate is checked against the other two.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import mpmath as mp
import numpy as np
from scipy.optimize import least_squares

from .dynamics import BoundaryPhase, MagicKind, TableSpec, closure_defect, step
from .geometry import ConfocalFamily, tangent_directions

EC_DPS = 50  # working precision (decimal digits) for curve arithmetic
TORSION_TOL = 1e-8
# relative u-distance below which two curve points count as the same point
# (well above the ~1e-49 representation noise, far below any root spacing)
_U_SNAP = 10.0 ** (10 - EC_DPS)
PELL_TOL = 1e-6
CLOSURE_TOL = 1e-6
CAYLEY_TOL = 1e-8
# roots are not searched within this (times a) of the degenerate caustics {0,b,a}
ROOT_MARGIN_RTOL = 1e-6
BISECT_RTOL = 1e-12


class DegenerateCubic(ValueError):
    """Two of the cubic's roots coincide; the square-root series degenerates."""


class UnsupportedParity(ValueError):
    """The system has no periodicity certificate at this parity of n."""


class DegenerateFocal(ValueError):
    """The focal-segment caustic beta = b separates the two caustic regimes."""


class CayleyMarker(Enum):
    """Non-numeric certificate outcomes."""

    ALWAYS_FALSE = "always-false"  # flip-short, odd n: closure impossible


@dataclass(frozen=True)
class PowerSeries:
    """Truncated real power series, ascending coefficients c0..cN."""

    coeffs: tuple[float, ...]

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class CurvePoint:
    """Affine point on y^2 = (a-x)(b-x)(beta-x), or the point at infinity.

    Coordinates are mpmath floats; ``x is None`` encodes infinity.
    """

    x: object | None
    y: object | None

    @property
    def is_infinity(self) -> bool:
        return self.x is None


INFINITY = CurvePoint(None, None)


@dataclass(frozen=True)
class PellPair:
    """Solution (p, q) of a polynomial Pell identity, ascending coefficients."""

    p: tuple[float, ...]
    q: tuple[float, ...]
    residual: float

    @property
    def degrees(self) -> tuple[int, int]:
        # the zero polynomial reports degree -1
        dq = len(self.q) - 1 if any(c != 0.0 for c in self.q) else -1
        return len(self.p) - 1, dq


@dataclass(frozen=True)
class CertificateBundle:
    """One periodic caustic with all four residuals for cross-checking."""

    system: MagicKind
    n: int
    beta: float
    cayley_value: float
    torsion_residual: float
    pell_residual: float | None
    closure_residual: float

    @property
    def verified(self) -> bool:
        return (
            abs(self.cayley_value) < CAYLEY_TOL
            and self.torsion_residual < TORSION_TOL
            and self.pell_residual is not None
            and self.pell_residual < PELL_TOL
            and self.closure_residual < CLOSURE_TOL
        )


# ---------------------------------------------------------------------------
# power series


def _check_distinct(a: float, b: float, beta: float) -> None:
    for u, v in ((a, b), (a, beta), (b, beta)):
        if abs(u - v) < 1e-12 * max(abs(u), abs(v)):
            raise DegenerateCubic(f"repeated cubic root: {u} ~ {v}")


def _sqrt_cubic_coeffs(p: float, q: float, r: float, nterms: int) -> list[float]:
    """Taylor coefficients of sqrt((p-x)(q-x)(r-x)) about x=0.

    Differentiating g^2 = f gives 2 f g' = f' g; matching coefficients
    yields a three-term recurrence driven by the cubic's coefficients.
    """
    f0 = p * q * r
    f1 = -(p * q + p * r + q * r)
    f2 = p + q + r
    f3 = -1.0
    out = [math.sqrt(f0)]
    for n in range(nterms - 1):
        t = (1 - 2 * n) * f1 * out[n]
        if n >= 1:
            t += (4 - 2 * n) * f2 * out[n - 1]
        if n >= 2:
            t += (7 - 2 * n) * f3 * out[n - 2]
        out.append(t / (2.0 * f0 * (n + 1)))
    return out


def series_sqrt_cubic(a: float, b: float, beta: float, N: int) -> PowerSeries:
    """B-series: coefficients B0..BN of sqrt((a-x)(b-x)(beta-x)), B0 = +sqrt(a b beta)."""
    if min(a, b, beta) <= 0.0:
        raise ValueError("cubic roots must be positive")
    if N < 2:
        raise ValueError("need N >= 2")
    _check_distinct(a, b, beta)
    return PowerSeries(tuple(_sqrt_cubic_coeffs(a, b, beta, N + 1)))


def _divide_linear(coeffs: list[float], b: float) -> list[float]:
    """Coefficients of series/(b-x): C_k = (B_k + C_{k-1})/b."""
    out: list[float] = []
    prev = 0.0
    for ck in coeffs:
        prev = (ck + prev) / b
        out.append(prev)
    return out


def series_divide_linear(s: PowerSeries, b: float) -> PowerSeries:
    """C-series: the B-series divided by (b-x), same truncation order."""
    if b <= 0.0:
        raise ValueError("need b > 0")
    return PowerSeries(tuple(_divide_linear(list(s.coeffs), b)))


# ---------------------------------------------------------------------------
# Cayley-type determinants


def cayley_det(
    system: MagicKind, n: int, a: float, b: float, beta: float
) -> float | CayleyMarker:
    """Hankel determinant whose vanishing certifies n-periodicity at caustic beta.

    Even n (any system): det of the (n/2 - 1)-size matrix with entries
    B_{3+i+j}.  Odd n: flip-long uses C_{2+i+j} (hyperbola caustics
    only), half-turn uses B_{2+i+j}; flip-short returns
    ``CayleyMarker.ALWAYS_FALSE`` (odd closure is impossible), and the
    identity system has no odd-n certificate here and raises.

    Internally the series is computed for the scaled cubic
    (1, b/a, beta/a): Hankel determinants are badly conditioned, and the
    dimensionless coefficients keep entries O(1).  Only the root set in
    beta matters, and it is invariant under the scaling.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if n % 2 == 0:
        m = n // 2
        if m < 2:
            return 1.0  # empty matrix: no n=2 condition, nothing vanishes
        coeffs = _sqrt_cubic_coeffs(1.0, b / a, beta / a, n)
        size = m - 1
        mat = np.array(
            [[coeffs[3 + i + j] for j in range(size)] for i in range(size)]
        )
        return float(np.linalg.det(mat))

    m = (n - 1) // 2
    if system is MagicKind.FLIP_SHORT:
        return CayleyMarker.ALWAYS_FALSE
    if system is MagicKind.IDENTITY:
        raise UnsupportedParity("identity system: no odd-period certificate")
    _check_distinct(a, b, beta)
    coeffs = _sqrt_cubic_coeffs(1.0, b / a, beta / a, n)
    if system is MagicKind.FLIP_LONG:
        if not (b < beta < a):
            raise ValueError("odd flip-long certificate needs a hyperbola caustic")
        coeffs = _divide_linear(coeffs, b / a)
        base = 2
    else:  # half-turn
        base = 2
    mat = np.array([[coeffs[base + i + j] for j in range(m)] for i in range(m)])
    return float(np.linalg.det(mat))


# ---------------------------------------------------------------------------
# elliptic-curve torsion

# The curve y^2 = (a-x)(b-x)(beta-x) is brought to the monic model
# y^2 = u^3 + s2 u^2 + s1 u + s0 by u = -x, so the chord-tangent formulas
# take their textbook form.


def _curve_sums(a, b, beta):
    a, b, beta = mp.mpf(a), mp.mpf(b), mp.mpf(beta)
    return a + b + beta, a * b + a * beta + b * beta, a * b * beta


def _add_u(P, Q, s2, s1):
    """Chord-tangent addition on the monic model; None is infinity."""
    if P is None:
        return Q
    if Q is None:
        return P
    u1, y1 = P
    u2, y2 = Q
    if (u2, y2) < (u1, y1):  # canonical order makes addition commute bit-for-bit
        u1, y1, u2, y2 = u2, y2, u1, y1
    # Copies of one point reached through different addition chains agree
    # only to working precision, so a secant slope between them would be
    # catastrophically cancelled noise; snap to the tangent/vertical case.
    near = abs(u1 - u2) <= _U_SNAP * (1 + abs(u1) + abs(u2))
    if near:
        if abs(y1 + y2) <= abs(y1 - y2):
            return None  # inverse pair (or doubled 2-torsion): vertical chord
        u1 = u2 = (u1 + u2) / 2
        y1 = (y1 + y2) / 2
        lam = (3 * u1 * u1 + 2 * s2 * u1 + s1) / (2 * y1)
    else:
        lam = (y2 - y1) / (u2 - u1)
    u3 = lam * lam - s2 - u1 - u2
    return u3, lam * (u1 - u3) - y1


def _mul_u(k: int, P, s2, s1):
    acc = None
    addend = P
    while k:
        if k & 1:
            acc = _add_u(acc, addend, s2, s1)
        addend = _add_u(addend, addend, s2, s1)
        k >>= 1
    return acc


def ec_add(P: CurvePoint, Q: CurvePoint, a: float, b: float, beta: float) -> CurvePoint:
    """Group law on y^2 = (a-x)(b-x)(beta-x), identity at infinity.

    Runs at ``EC_DPS`` decimal digits; double precision loses too much
    near the identity for the torsion residuals to mean anything.
    """
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    with mp.workdps(EC_DPS):
        s2, s1, _ = _curve_sums(a, b, beta)
        pu = (-mp.mpf(P.x), mp.mpf(P.y))
        qu = (-mp.mpf(Q.x), mp.mpf(Q.y))
        r = _add_u(pu, qu, s2, s1)
        if r is None:
            return INFINITY
        return CurvePoint(-r[0], r[1])


def ec_neg(P: CurvePoint) -> CurvePoint:
    if P.is_infinity:
        return P
    # exact sign flip: plain unary minus would re-round to the ambient
    # precision and the result could miss y1 == -y2 inside ec_add
    return CurvePoint(P.x, mp.fneg(P.y, exact=True))


def torsion_check(system: MagicKind, n: int, a: float, b: float, beta: float) -> float:
    """Residual of the torsion certificate at (n, beta); ~0 certifies closure.

    Even n: computes [n]Q0 with Q0 = (0, +sqrt(a b beta)).  Odd n:
    flip-long adds the 2-torsion point Q_b = (b, 0) (so the condition is
    [n](Q0 - Q_b) = O), half-turn again uses [n]Q0.  The residual is
    1/(1+|x|) of the resulting point — 0 at infinity — to be compared
    against ``TORSION_TOL``.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    odd = n % 2 == 1
    if odd and system in (MagicKind.IDENTITY, MagicKind.FLIP_SHORT):
        raise UnsupportedParity(f"{system.value}: no odd-period torsion condition")
    if odd and system is MagicKind.FLIP_LONG and not (b < beta < a):
        raise ValueError("odd flip-long certificate needs a hyperbola caustic")
    with mp.workdps(EC_DPS):
        s2, s1, s0 = _curve_sums(a, b, beta)
        q0 = (mp.mpf(0), mp.sqrt(s0))
        t = _mul_u(n, q0, s2, s1)
        if odd and system is MagicKind.FLIP_LONG:
            # [n](Q0 - Q_b) = [n]Q0 + Q_b since Q_b is 2-torsion and n is odd
            t = _add_u(t, (-mp.mpf(b), mp.mpf(0)), s2, s1)
        if t is None:
            return 0.0
        return float(1 / (1 + abs(t[0])))


# ---------------------------------------------------------------------------
# polynomial Pell equations


def _pad_to(arr: np.ndarray, size: int) -> np.ndarray:
    out = np.zeros(size)
    out[: len(arr)] = arr
    return out


def _pell_seed(system: MagicKind, n: int, a: float, b: float, beta: float):
    """Initial (p, q) from the series: SVD null vector + truncated product.

    Writing the target identity in the trajectory variable x = 1/s turns
    it into u(x)^2 - f(x) w(x)^2 = c x^n (and folded variants), where
    u approximates series*w truncated at degree m.  The coefficients of
    the series product in degrees m+1..n-1 must vanish; near a root the
    smallest singular vector of that coefficient map is the seed for w.
    Returns (p, q) in the s-variable, or None when no certificate exists.
    """
    even = n % 2 == 0
    if even:
        m = n // 2
        if m < 2:
            return None  # n=2: q would be the zero polynomial, p^2 = 1 unsolvable
        s = _sqrt_cubic_coeffs(a, b, beta, n)
        rows = range(m + 1, 2 * m)
        wlen = m - 1
    else:
        m = (n - 1) // 2
        if m < 1 or system in (MagicKind.IDENTITY, MagicKind.FLIP_SHORT):
            return None
        s = _sqrt_cubic_coeffs(a, b, beta, n)
        if system is MagicKind.FLIP_LONG:
            if not (b < beta < a):
                return None
            s = _divide_linear(s, b)
        rows = range(m + 1, 2 * m + 1)
        wlen = m
    mat = np.array([[s[k - j] for j in range(wlen)] for k in rows])
    _, _, vh = np.linalg.svd(mat)
    w = vh[-1]
    u = np.convolve(np.array(s), w)[: m + 1]

    if even:
        f = np.array([a * b * beta, -(a * b + a * beta + b * beta), a + b + beta, -1.0])
        defect = _pad_to(np.convolve(u, u), n + 1) - _pad_to(
            np.convolve(f, np.convolve(w, w)), n + 1
        )
        c = defect[n]
        if c <= 0.0:
            return None
        return u[::-1] / math.sqrt(c), w[::-1] * math.sqrt(a * b * beta / c)

    if system is MagicKind.FLIP_LONG:
        # (b-x) u^2 - (a-x)(beta-x) w^2 = c x^n with c < 0
        lin = np.array([b, -1.0])
        quad = np.array([a * beta, -(a + beta), 1.0])
        defect = _pad_to(np.convolve(lin, np.convolve(u, u)), n + 1) - _pad_to(
            np.convolve(quad, np.convolve(w, w)), n + 1
        )
        c = defect[n]
        if c >= 0.0:
            return None
        return u[::-1] * math.sqrt(b / -c), w[::-1] * math.sqrt(a * beta / -c)

    # half-turn: u^2 - f w^2 = c x^n with c > 0
    f = np.array([a * b * beta, -(a * b + a * beta + b * beta), a + b + beta, -1.0])
    defect = _pad_to(np.convolve(u, u), n + 1) - _pad_to(
        np.convolve(f, np.convolve(w, w)), n + 1
    )
    c = defect[n]
    if c <= 0.0:
        return None
    return u[::-1] / math.sqrt(c), w[::-1] * math.sqrt(a * b * beta / c)


def _pell_defect(system: MagicKind, n: int, a: float, b: float, beta: float):
    """Defect-coefficient function for the s-variable Pell identity."""
    even = n % 2 == 0
    plen = (n // 2 if even else (n - 1) // 2) + 1
    ra, rb, rbeta = 1.0 / a, 1.0 / b, 1.0 / beta

    if even:
        quart = np.convolve(
            np.array([0.0, 1.0]),
            np.convolve(
                np.convolve([-ra, 1.0], [-rb, 1.0]), np.array([-rbeta, 1.0])
            ),
        )
        target = 1.0
        lead = None
    elif system is MagicKind.FLIP_LONG:
        quart = np.convolve(
            np.array([0.0, 1.0]), np.convolve([-ra, 1.0], [-rbeta, 1.0])
        )
        target = -1.0
        lead = np.array([-rb, 1.0])
    else:
        quart = np.convolve(
            np.convolve([-ra, 1.0], [-rb, 1.0]), np.array([-rbeta, 1.0])
        )
        target = 1.0
        lead = np.array([0.0, 1.0])

    def defect(z: np.ndarray) -> np.ndarray:
        p, q = z[:plen], z[plen:]
        p2 = np.convolve(p, p)
        if lead is not None:
            p2 = np.convolve(lead, p2)
        q2 = np.convolve(quart, np.convolve(q, q))
        size = max(len(p2), len(q2))
        d = _pad_to(p2, size) - _pad_to(q2, size)
        d[0] -= target
        return d

    return defect, plen


def pell_solve(
    system: MagicKind, n: int, a: float, b: float, beta: float
) -> PellPair | None:
    """Solve the Pell identity for (system, n) at caustic beta, or None.

    Even n: p^2 - s(s-1/a)(s-1/b)(s-1/beta) q^2 = 1, degrees (m, m-2).
    Odd flip-long: (s-1/b) p^2 - s(s-1/a)(s-1/beta) q^2 = -1, (m, m-1).
    Odd half-turn: s p^2 - (s-1/a)(s-1/b)(s-1/beta) q^2 = 1, (m, m-1).

    The series seed is polished by Levenberg-Marquardt on the defect
    coefficients; returns None when no identity exists for the parity or
    the polished residual stays above ``PELL_TOL``.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    seed = _pell_seed(system, n, a, b, beta)
    if seed is None:
        return None
    p0, q0 = seed
    defect, plen = _pell_defect(system, n, a, b, beta)
    z0 = np.concatenate([p0, q0])
    fit = least_squares(defect, z0, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    z = fit.x
    residual = float(np.max(np.abs(defect(z))))
    if residual > PELL_TOL:
        return None
    p, q = z[:plen], z[plen:]
    if p[-1] < 0.0:
        p = -p
    if len(q) and q[np.argmax(np.abs(q))] < 0.0:
        q = -q
    return PellPair(tuple(float(c) for c in p), tuple(float(c) for c in q), residual)


# ---------------------------------------------------------------------------
# root finding and cross-validation

# deterministic scan for a boundary parameter from which tangent lines to
# C_beta exist (hyperbola caustics are reachable only from part of the wall)
_T0_SCAN = [0.83 + 0.031 * k for k in range(200)]


def _closure_residual(system: MagicKind, n: int, a: float, b: float, beta: float) -> float:
    fam = ConfocalFamily(a, b)
    table = TableSpec(fam, system)
    for t0 in _T0_SCAN:
        p = fam.boundary_point(t0)
        dirs = tangent_directions(fam, beta, p)
        if dirs:
            return closure_defect(table, BoundaryPhase(p, dirs[0]), n)
    return math.inf


def _bundle(system: MagicKind, n: int, a: float, b: float, beta: float) -> CertificateBundle:
    det = cayley_det(system, n, a, b, beta)
    pell = pell_solve(system, n, a, b, beta)
    return CertificateBundle(
        system=system,
        n=n,
        beta=beta,
        cayley_value=float(det),
        torsion_residual=torsion_check(system, n, a, b, beta),
        pell_residual=None if pell is None else pell.residual,
        closure_residual=_closure_residual(system, n, a, b, beta),
    )


def find_periodic_caustics(
    system: MagicKind,
    n: int,
    a: float,
    b: float,
    interval: tuple[float, float],
    grid: int = 64,
) -> list[CertificateBundle]:
    """All caustic parameters in ``interval`` whose trajectories are n-periodic.

    Scans the Cayley determinant on a grid, brackets sign changes, and
    bisects to |dbeta| < 1e-12 a.  The search automatically stays clear
    of the degenerate caustics {0, b, a} by ``ROOT_MARGIN_RTOL * a`` and,
    for the odd flip-long certificate, restricts itself to the hyperbola
    range (b, a).  Every root comes back as a CertificateBundle with the
    torsion, Pell, and direct-simulation residuals filled in.
    """
    if grid < 64:
        raise ValueError("need grid >= 64")
    lo, hi = interval
    if not (0.0 <= lo < hi <= a):
        raise ValueError(f"interval {interval} not inside (0, {a})")
    if n < 2:
        raise ValueError("need n >= 2")
    odd = n % 2 == 1
    if odd and system is MagicKind.IDENTITY:
        raise UnsupportedParity("identity system: no odd-period certificate")
    if odd and system is MagicKind.FLIP_SHORT:
        return []  # closure at odd n is impossible for the short-axis flip
    if n == 2:
        return []  # empty determinant: no nondegenerate 2-periodic caustic

    margin = ROOT_MARGIN_RTOL * a
    windows = [(margin, b - margin), (b + margin, a - margin)]
    if odd and system is MagicKind.FLIP_LONG:
        windows = windows[1:]

    def det_at(beta: float) -> float:
        return float(cayley_det(system, n, a, b, beta))

    roots: list[float] = []
    for wlo, whi in windows:
        wlo, whi = max(wlo, lo), min(whi, hi)
        if whi <= wlo:
            continue
        xs = np.linspace(wlo, whi, grid)
        vals = [det_at(x) for x in xs]
        for i in range(grid - 1):
            f0, f1 = vals[i], vals[i + 1]
            if f0 == 0.0:
                roots.append(float(xs[i]))
                continue
            if f0 * f1 >= 0.0:
                continue
            blo, bhi, flo = float(xs[i]), float(xs[i + 1]), f0
            while bhi - blo > BISECT_RTOL * a:
                mid = 0.5 * (blo + bhi)
                fm = det_at(mid)
                if fm == 0.0:
                    blo = bhi = mid
                    break
                if flo * fm < 0.0:
                    bhi = mid
                else:
                    blo, flo = mid, fm
            roots.append(0.5 * (blo + bhi))

    # dedupe grid-edge duplicates
    roots.sort()
    kept: list[float] = []
    for r in roots:
        if not kept or r - kept[-1] > 1e-9 * a:
            kept.append(r)
    return [_bundle(system, n, a, b, r) for r in kept]


# ---------------------------------------------------------------------------
# rotation number


def rotation_number(a: float, b: float, beta: float, reflections: int = 10_000) -> float:
    """Long-run rotation (or libration) rate of the standard billiard at caustic beta.

    Ellipse caustics: mean polar winding per reflection, measured over
    ``reflections`` bounces of the identity system; closure with winding
    m after n bounces shows up as the rational m/n.  Hyperbola caustics:
    the analogous libration ratio, counted as sign changes of the
    angular increment per bounce / 2.
    """
    fam = ConfocalFamily(a, b)
    if not (0.0 < beta < a):
        raise ValueError(f"caustic parameter {beta} outside (0, {a})")
    if abs(beta - b) < 1e-9 * a:
        raise DegenerateFocal("beta = b is the focal segment; no rotation number")
    table = TableSpec(fam, MagicKind.IDENTITY)
    s0 = None
    for t0 in _T0_SCAN:
        p = fam.boundary_point(t0)
        dirs = tangent_directions(fam, beta, p)
        if dirs:
            s0 = BoundaryPhase(p, dirs[0])
            break
    if s0 is None:
        raise ValueError(f"no chord tangent to C_{beta} found")

    total = 0.0
    flips = 0
    prev_sign = 0
    prev_theta = math.atan2(s0.at[1], s0.at[0])
    s = s0
    for _ in range(reflections):
        s = step(table, s)
        th = math.atan2(s.at[1], s.at[0])
        d = th - prev_theta
        while d > math.pi:
            d -= 2.0 * math.pi
        while d < -math.pi:
            d += 2.0 * math.pi
        total += d
        prev_theta = th
        if abs(d) > 1e-12:
            sign = 1 if d > 0.0 else -1
            if prev_sign and sign != prev_sign:
                flips += 1
            prev_sign = sign
    if beta < b:
        return abs(total) / (2.0 * math.pi * reflections)
    return flips / (2.0 * reflections)
