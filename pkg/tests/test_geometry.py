"""
Планарные примитивы: точка Ферма, предикаты, отражения, теорема Вивиани.
"""
import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings, strategies as st

from SteinerKit.common.exceptions import InvalidInputError
from SteinerKit.geometry import (TWO_PI_3, angle_at, distance_sum_to_sides, fermat_point, fermat_points,
                                 geometric_median4, line_intersection, orient2d, reflect, segments_intersect)
from SteinerKit.types import Line, Point, Segment

SQRT3 = math.sqrt(3.0)

coords = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)
points = st.builds(Point, coords, coords)


@st.composite
def acute_triangles(draw):
    """Треугольники со сторонами ≥ 0.1 и всеми углами меньше 2π/3 − 0.05."""
    a, b, c = draw(points), draw(points), draw(points)
    assume(min(a.distance_to(b), b.distance_to(c), c.distance_to(a)) > 0.1)
    assume(abs(orient2d(a, b, c)) == 1)
    angles = (angle_at(a, b, c), angle_at(b, c, a), angle_at(c, a, b))
    assume(min(angles) > 0.05 and max(angles) < TWO_PI_3 - 0.05)
    return a, b, c


# ---------------------------------------------------------------------------
# Точка Ферма
# ---------------------------------------------------------------------------

def test_fermat_equilateral_is_centroid():
    res = fermat_point(Point(0, 0), Point(1, 0), Point(0.5, SQRT3 / 2))
    assert not res.degenerate
    assert res.point.x == pytest.approx(0.5, abs=1e-12)
    assert res.point.y == pytest.approx(SQRT3 / 6, abs=1e-12)
    assert res.tripod_length == pytest.approx(SQRT3, abs=1e-12)


def test_fermat_of_first_branching():
    lam = 0.01
    res = fermat_point(Point(0, 0), Point(1 + lam / 2, SQRT3 * lam / 2), Point(1 + lam / 2, -SQRT3 * lam / 2))
    assert math.dist(res.point.as_tuple(), (1.0, 0.0)) < 1e-12
    assert res.tripod_length == pytest.approx(1 + 2 * lam, abs=1e-12)


def test_fermat_obtuse_vertex():
    a, b, c = Point(0, 0), Point(1, 0), Point(1.5, 0.05)
    res = fermat_point(a, b, c)
    assert res.degenerate
    assert res.attained_at_vertex == 1
    assert res.point == b
    assert res.tripod_length == pytest.approx(1 + math.hypot(0.5, 0.05), abs=1e-15)


def test_fermat_coincident_vertices():
    with pytest.raises(InvalidInputError):
        fermat_point(Point(0, 0), Point(0, 0), Point(1, 1))


@settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
@given(acute_triangles())
def test_fermat_angles_are_120(triangle):
    a, b, c = triangle
    s = fermat_point(a, b, c).point
    for p, q in ((a, b), (b, c), (c, a)):
        assert abs(angle_at(s, p, q) - TWO_PI_3) < 1e-9


@settings(max_examples=50, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
@given(acute_triangles(), st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_fermat_point_is_local_minimum(triangle, seed):
    a, b, c = triangle
    res = fermat_point(a, b, c)
    verts = np.array([a.as_tuple(), b.as_tuple(), c.as_tuple()])
    shifts = np.random.default_rng(seed).uniform(-1e-3, 1e-3, size=(1000, 2))
    moved = np.array(res.point.as_tuple()) + shifts
    sums = np.linalg.norm(moved[:, None, :] - verts[None, :, :], axis=-1).sum(axis=1)
    assert sums.min() >= res.tripod_length - 1e-12


def test_fermat_points_matches_scalar():
    rng = np.random.default_rng(7)
    tri = rng.uniform(-5, 5, size=(200, 3, 2))
    batch = fermat_points(tri[:, 0], tri[:, 1], tri[:, 2])
    for row, got in zip(tri, batch):
        expected = fermat_point(*(Point(*p) for p in row)).point
        assert math.dist(expected.as_tuple(), got) < 1e-9


def test_fermat_points_coincident_pair():
    a = np.array([[0.0, 0.0]])
    b = np.array([[1.0, 1.0]])
    got = fermat_points(a, b, b)
    assert np.allclose(got, b)


def test_geometric_median_of_square():
    q = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    assert np.allclose(geometric_median4(q), [0.5, 0.5])


@pytest.mark.parametrize("q", [
    [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],  # параллельные стороны
    [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [4.0, 0.0]],  # все на одной прямой
])
def test_geometric_median_degenerate_lines_are_silent(q):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        x = geometric_median4(np.array(q))
    assert np.isfinite(x).all()


def test_geometric_median_of_collinear_points():
    x = geometric_median4(np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [4.0, 0.0]]))
    assert x[1] == 0.0
    assert 1.0 <= x[0] <= 2.0


def test_geometric_median_of_triangle_with_interior_point():
    q = np.array([[0.0, 0.0], [4.0, 0.0], [0.0, 4.0], [1.0, 1.0]])
    assert np.allclose(geometric_median4(q), [1.0, 1.0])


# ---------------------------------------------------------------------------
# Предикаты
# ---------------------------------------------------------------------------

def test_orient2d_basic():
    assert orient2d(Point(0, 0), Point(1, 0), Point(0, 1)) == 1
    assert orient2d(Point(0, 0), Point(0, 1), Point(1, 0)) == -1
    assert orient2d(Point(0.5, 0.5), Point(12, 12), Point(24, 24)) == 0


@settings(max_examples=300)
@given(st.floats(min_value=0.0, max_value=1.0), st.integers(min_value=-4, max_value=4))
def test_orient2d_matches_exact_arithmetic(t, nudge):
    # почти коллинеарные тройки: знак должен совпасть с точным вычислением
    a, b = Point(0.1, 0.1), Point(0.7, 0.3)
    c = Point(0.1 + 0.6 * t, 0.1 + 0.2 * t + nudge * 2.0 ** -50)
    exact = (Fraction(a.x) - Fraction(c.x)) * (Fraction(b.y) - Fraction(c.y)) - \
            (Fraction(a.y) - Fraction(c.y)) * (Fraction(b.x) - Fraction(c.x))
    assert orient2d(a, b, c) == (exact > 0) - (exact < 0)


def test_segments_intersect_cases():
    s = Segment(Point(0, 0), Point(2, 0))
    assert segments_intersect(s, Segment(Point(1, -1), Point(1, 1)))
    assert segments_intersect(s, Segment(Point(1, 0), Point(1, 1)))  # T-касание
    assert segments_intersect(s, Segment(Point(1, 0), Point(3, 0)))  # наложение
    assert not segments_intersect(s, Segment(Point(3, 0), Point(4, 0)))
    assert not segments_intersect(s, Segment(Point(0, 1), Point(2, 1)))


def test_segments_sharing_endpoint():
    shared = Point(0, 0)
    s = Segment(shared, Point(2, 0))
    assert not segments_intersect(s, Segment(shared, Point(0, 1)), shared)
    assert not segments_intersect(s, Segment(shared, Point(-1, 0)), shared)
    assert segments_intersect(s, Segment(shared, Point(1, 0)), shared)
    with pytest.raises(InvalidInputError):
        segments_intersect(s, Segment(Point(5, 5), Point(0, 1)), shared)


@given(points, points, points, points)
def test_segments_intersect_symmetric(a, b, c, d):
    assume(a != b and c != d)
    s1, s2 = Segment(a, b), Segment(c, d)
    assert segments_intersect(s1, s2) == segments_intersect(s2, s1)


# ---------------------------------------------------------------------------
# Углы, отражения, прямые
# ---------------------------------------------------------------------------

def test_angle_at():
    o = Point(0, 0)
    assert angle_at(o, Point(1, 0), Point(0, 1)) == pytest.approx(math.pi / 2)
    assert angle_at(o, Point(1, 0), Point(-1, 0)) == pytest.approx(math.pi)
    assert angle_at(o, Point(1, 0), Point(2, 0)) == 0.0
    with pytest.raises(InvalidInputError):
        angle_at(o, o, Point(1, 0))


def test_reflect_in_x_axis():
    assert reflect(Point(2, 3), Line.x_axis()) == Point(2, -3)


@given(points, points, st.floats(min_value=0.0, max_value=2 * math.pi))
def test_reflect_is_isometric_involution(p, q, angle):
    axis = Line(Point(0.3, -0.2), (math.cos(angle), math.sin(angle)))
    rp, rq = reflect(p, axis), reflect(q, axis)
    assert math.isclose(rp.distance_to(rq), p.distance_to(q), rel_tol=1e-12, abs_tol=1e-12)
    back = reflect(rp, axis)
    assert math.dist(back.as_tuple(), p.as_tuple()) < 1e-12


def test_line_intersection():
    p = line_intersection(Line(Point(-1, 0), (1, 0)), Line(Point(0, 5), (0, -2)))
    assert p.x == pytest.approx(0, abs=1e-15)
    assert p.y == pytest.approx(0, abs=1e-15)
    with pytest.raises(InvalidInputError):
        line_intersection(Line.x_axis(), Line(Point(0, 1), (3, 0)))


# ---------------------------------------------------------------------------
# Теорема Вивиани
# ---------------------------------------------------------------------------

TRIANGLE = (Point(0, 0), Point(2, 0), Point(1, SQRT3))


def test_viviani_at_centroid_and_vertex():
    assert distance_sum_to_sides(Point(1, SQRT3 / 3), TRIANGLE) == pytest.approx(SQRT3, abs=1e-12)
    assert distance_sum_to_sides(Point(2, 0), TRIANGLE) == pytest.approx(SQRT3, abs=1e-12)


@given(st.floats(min_value=0, max_value=1), st.floats(min_value=0, max_value=1))
def test_viviani_constant_inside(u, v):
    if u + v > 1:
        u, v = 1 - u, 1 - v
    a, b, c = TRIANGLE
    p = Point(a.x + u * (b.x - a.x) + v * (c.x - a.x), a.y + u * (b.y - a.y) + v * (c.y - a.y))
    assert distance_sum_to_sides(p, TRIANGLE) == pytest.approx(SQRT3, abs=1e-12)


def test_viviani_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        distance_sum_to_sides(Point(5, 5), TRIANGLE)
    with pytest.raises(InvalidInputError):
        distance_sum_to_sides(Point(0.5, 0.1), (Point(0, 0), Point(2, 0), Point(1, 1)))
