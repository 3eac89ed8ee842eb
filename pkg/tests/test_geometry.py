"""Confocal-coordinate and ray-geometry tests."""
import math

import pytest
from hypothesis import given, settings, strategies as st

from magicbilliards import (
    CenterDegenerate,
    ConfocalFamily,
    NoForwardHit,
    caustic_of_line,
    classify_caustic,
    from_elliptic,
    normal_at,
    ray_boundary_hit,
    tangent_directions,
    to_elliptic,
)

FAM = ConfocalFamily(9.0, 4.0)


def test_family_validation():
    with pytest.raises(ValueError):
        ConfocalFamily(4.0, 9.0)
    with pytest.raises(ValueError):
        ConfocalFamily(9.0, -1.0)
    with pytest.raises(ValueError):
        ConfocalFamily(9.0, 9.0)


def test_foci():
    c = math.sqrt(5.0)
    (f1, f2) = FAM.foci()
    assert f1 == pytest.approx((c, 0.0))
    assert f2 == pytest.approx((-c, 0.0))


def test_boundary_point_on_conic():
    for k in range(17):
        t = 2.0 * math.pi * k / 17
        x, y = FAM.boundary_point(t)
        assert abs(FAM.conic_residual(0.0, x, y)) < 1e-14


def test_elliptic_coords_quadratic_oracle():
    # lambda solves lam^2 - S lam + P = 0 with S = a+b-x^2-y^2 and
    # P = ab - b x^2 - a y^2; at (1,1) that is lam^2 - 11 lam + 23 = 0.
    e = to_elliptic(FAM, (1.0, 1.0))
    r = math.sqrt(29.0)
    assert e.lam1 == pytest.approx((11.0 - r) / 2.0, rel=1e-14)
    assert e.lam2 == pytest.approx((11.0 + r) / 2.0, rel=1e-14)


def test_elliptic_coords_ordering_and_ranges():
    for p in [(2.0, 0.5), (0.3, 1.9), (-2.5, -0.2), (1.0, -1.0)]:
        e = to_elliptic(FAM, p)
        assert 0.0 <= e.lam1 <= FAM.b <= e.lam2 <= FAM.a


def test_center_degenerate():
    with pytest.raises(CenterDegenerate):
        to_elliptic(FAM, (0.0, 0.0))


@given(
    t=st.floats(0.0, 2.0 * math.pi, allow_nan=False),
    r=st.floats(0.05, 0.995),
)
@settings(max_examples=200, deadline=None)
def test_elliptic_roundtrip(t, r):
    """to_elliptic and from_elliptic invert each other on the open quadrants."""
    x = r * math.sqrt(FAM.a) * math.cos(t)
    y = r * math.sqrt(FAM.b) * math.sin(t)
    if abs(x) < 1e-6 or abs(y) < 1e-6:
        return  # axis points lose the quadrant sign
    e = to_elliptic(FAM, (x, y))
    q = (1 if x > 0 else -1, 1 if y > 0 else -1)
    back = from_elliptic(FAM, e, q)
    assert back[0] == pytest.approx(x, abs=1e-9)
    assert back[1] == pytest.approx(y, abs=1e-9)


def test_classify_caustic_kinds():
    assert classify_caustic(FAM, 2.5).kind == "ellipse"
    assert classify_caustic(FAM, 6.0).kind == "hyperbola"
    assert classify_caustic(FAM, 0.0).kind == "degenerate-boundary"
    assert classify_caustic(FAM, 4.0).kind == "degenerate-focal"
    assert classify_caustic(FAM, 9.0).kind == "degenerate-short-axis"
    # degeneracy tolerance is relative to a
    assert classify_caustic(FAM, 4.0 + 1e-10).kind == "degenerate-focal"
    with pytest.raises(ValueError):
        classify_caustic(FAM, -0.5)
    with pytest.raises(ValueError):
        classify_caustic(FAM, 9.5)


@given(
    t=st.floats(0.0, 2.0 * math.pi),
    th=st.floats(0.0, 2.0 * math.pi),
    shift=st.floats(0.1, 0.9),
    scale=st.floats(0.2, 5.0),
)
@settings(max_examples=200, deadline=None)
def test_caustic_of_line_parametrization_invariant(t, th, shift, scale):
    """The caustic depends on the line only, not on the point/speed chosen."""
    p = FAM.boundary_point(t)
    v = (math.cos(th), math.sin(th))
    nx, ny = p[0] / FAM.a, p[1] / FAM.b
    if v[0] * nx + v[1] * ny > -1e-3:  # keep rays that enter the table
        return
    lam0 = caustic_of_line(FAM, p, v).lam
    hit = ray_boundary_hit(FAM, 0.0, p, v)
    q = (p[0] + shift * (hit[0] - p[0]), p[1] + shift * (hit[1] - p[1]))
    lam1 = caustic_of_line(FAM, q, (scale * v[0], scale * v[1])).lam
    assert lam1 == pytest.approx(lam0, abs=1e-9)


def test_caustic_of_vertical_line():
    lam = caustic_of_line(FAM, (1.5, 0.3), (0.0, 1.0)).lam
    assert lam == pytest.approx(9.0 - 1.5**2, rel=1e-13)


def test_caustic_interval_law():
    # chords crossing the open focal segment touch a hyperbola, others an ellipse
    f = math.sqrt(5.0)
    c = caustic_of_line(FAM, (0.5 * f, 0.0), (0.3, 1.0))
    assert c.kind == "hyperbola" and FAM.b < c.lam < FAM.a
    c2 = caustic_of_line(FAM, (2.9, 0.0), (0.3, 1.0))
    assert c2.kind == "ellipse" and 0.0 < c2.lam < FAM.b


def test_ray_boundary_hit_lands_on_conic():
    p = FAM.boundary_point(0.4)
    v = (-0.6, -0.8)
    hit = ray_boundary_hit(FAM, 0.0, p, v)
    assert abs(FAM.conic_residual(0.0, hit[0], hit[1])) < 1e-10
    # and the hit is ahead of p, not p itself
    assert math.hypot(hit[0] - p[0], hit[1] - p[1]) > 1e-6


def test_ray_misses_inner_conic():
    # a chord tangent to C_2.5 stays outside C_3.0
    p = FAM.boundary_point(1.2)
    v = tangent_directions(FAM, 2.5, p)[0]
    with pytest.raises(NoForwardHit):
        ray_boundary_hit(FAM, 3.0, p, v)


def test_normal_at_is_inward_unit():
    for t in (0.0, 0.7, 2.1, 4.4):
        p = FAM.boundary_point(t)
        n = normal_at(FAM, 0.0, p)
        assert math.hypot(*n) == pytest.approx(1.0, rel=1e-12)
        # inward: a short move along n decreases the conic residual
        eps = 1e-6
        inside = FAM.conic_residual(0.0, p[0] + eps * n[0], p[1] + eps * n[1])
        assert inside < 0.0


def test_normal_at_inner_points_outward_into_annulus():
    lam = 3.0
    p = (math.sqrt(FAM.a - lam), 0.0)
    n = normal_at(FAM, lam, p, inner=True)
    # for the annulus wall the useful normal points away from the center
    assert n[0] > 0.0


def test_tangent_directions_touch_the_caustic():
    for beta in (1.0, 2.5, 3.9):
        for t in (0.3, 1.0, 2.8, 5.0):
            p = FAM.boundary_point(t)
            dirs = tangent_directions(FAM, beta, p)
            assert len(dirs) == 2
            for v in dirs:
                assert caustic_of_line(FAM, p, v).lam == pytest.approx(beta, abs=1e-8)


def test_tangent_directions_hyperbola_band():
    # hyperbola tangencies exist only on part of the boundary
    some, none = 0, 0
    for k in range(64):
        t = 2.0 * math.pi * (k + 0.5) / 64
        dirs = tangent_directions(FAM, 6.0, FAM.boundary_point(t))
        if dirs:
            some += 1
            for v in dirs:
                assert caustic_of_line(FAM, FAM.boundary_point(t), v).lam == pytest.approx(
                    6.0, abs=1e-8
                )
        else:
            none += 1
    assert some > 0 and none > 0
