"""
Планарные примитивы: точка Ферма–Торричелли, углы, отражения, пересечение отрезков,
сумма расстояний до сторон правильного треугольника.
"""
from __future__ import annotations

import logging
import math
from fractions import Fraction

import numpy as np

from .common.exceptions import InvalidInputError
from .types import FermatResult, Line, Point, Segment

logger = logging.getLogger("SteinerKit.geometry")

TWO_PI_3 = 2.0 * math.pi / 3.0
DEGENERACY_SLACK = 1e-12
"""Угол ≥ 2π/3 − DEGENERACY_SLACK считается вырожденным."""

_HALF_ULP = 2.0 ** -53
_CCW_ERRBOUND_A = (3.0 + 16.0 * _HALF_ULP) * _HALF_ULP


# ---------------------------------------------------------------------------
# Предикаты
# ---------------------------------------------------------------------------

def orient2d(a: Point, b: Point, c: Point) -> int:
    """
    Знак ориентации тройки (a, b, c): 1 — против часовой стрелки, −1 — по часовой, 0 — коллинеарны.
    Сначала вычисление в double с априорной оценкой ошибки, при неопределенности — точно в Fraction.
    """
    detleft = (a.x - c.x) * (b.y - c.y)
    detright = (a.y - c.y) * (b.x - c.x)
    det = detleft - detright
    if detleft > 0.0:
        if detright <= 0.0:
            return _sign(det)
        detsum = detleft + detright
    elif detleft < 0.0:
        if detright >= 0.0:
            return _sign(det)
        detsum = -detleft - detright
    else:
        return _sign(det)
    errbound = _CCW_ERRBOUND_A * detsum
    if det >= errbound or -det >= errbound:
        return _sign(det)
    return _orient2d_exact(a, b, c)


def _orient2d_exact(a: Point, b: Point, c: Point) -> int:
    ax, ay = Fraction(a.x) - Fraction(c.x), Fraction(a.y) - Fraction(c.y)
    bx, by = Fraction(b.x) - Fraction(c.x), Fraction(b.y) - Fraction(c.y)
    return _sign(ax * by - ay * bx)


def _sign(value) -> int:
    return (value > 0) - (value < 0)


def _on_segment(p: Point, q: Point, r: Point) -> bool:
    """r коллинеарна pq; лежит ли r на замкнутом отрезке [pq]."""
    return min(p.x, q.x) <= r.x <= max(p.x, q.x) and min(p.y, q.y) <= r.y <= max(p.y, q.y)


def segments_intersect(s1: Segment, s2: Segment, shared: Point | None = None) -> bool:
    """
    Пересекаются ли замкнутые отрезки.

    :param shared: общий конец смежных ребер; касание только в нем пересечением не считается,
        считается лишь наложение отрезков за пределами этой точки.
    """
    a, b, c, d = s1.a, s1.b, s2.a, s2.b
    if shared is not None:
        if shared not in (a, b) or shared not in (c, d):
            raise InvalidInputError("Объявленный общий конец не принадлежит обоим отрезкам", "shared",
                                    shared.as_tuple())
        u = b if a == shared else a
        w = d if c == shared else c
        if orient2d(shared, u, w) != 0:
            return False
        dot = (Fraction(u.x) - Fraction(shared.x)) * (Fraction(w.x) - Fraction(shared.x)) + \
              (Fraction(u.y) - Fraction(shared.y)) * (Fraction(w.y) - Fraction(shared.y))
        return dot > 0

    o1 = orient2d(a, b, c)
    o2 = orient2d(a, b, d)
    o3 = orient2d(c, d, a)
    o4 = orient2d(c, d, b)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    if o1 == 0 and _on_segment(a, b, c):
        return True
    if o2 == 0 and _on_segment(a, b, d):
        return True
    if o3 == 0 and _on_segment(c, d, a):
        return True
    if o4 == 0 and _on_segment(c, d, b):
        return True
    return False


# ---------------------------------------------------------------------------
# Углы, отражения, прямые
# ---------------------------------------------------------------------------

def angle_at(vertex: Point, p: Point, q: Point) -> float:
    """
    Неориентированный угол между лучами vertex→p и vertex→q, в [0, π].
    """
    ux, uy = p.x - vertex.x, p.y - vertex.y
    vx, vy = q.x - vertex.x, q.y - vertex.y
    if (ux == 0.0 and uy == 0.0) or (vx == 0.0 and vy == 0.0):
        raise InvalidInputError("Луч нулевой длины", "vertex", vertex.as_tuple())
    return math.atan2(abs(ux * vy - uy * vx), ux * vx + uy * vy)


def reflect(p: Point, axis: Line) -> Point:
    """Зеркальное отражение точки относительно прямой."""
    dx, dy = axis.direction
    vx, vy = p.x - axis.origin.x, p.y - axis.origin.y
    proj = vx * dx + vy * dy
    return Point(axis.origin.x + 2.0 * proj * dx - vx, axis.origin.y + 2.0 * proj * dy - vy)


def line_intersection(l1: Line, l2: Line) -> Point:
    """Точка пересечения двух непараллельных прямых."""
    (d1x, d1y), (d2x, d2y) = l1.direction, l2.direction
    denom = d1x * d2y - d1y * d2x
    if abs(denom) < 1e-15:
        raise InvalidInputError("Прямые параллельны")
    wx, wy = l2.origin.x - l1.origin.x, l2.origin.y - l1.origin.y
    t = (wx * d2y - wy * d2x) / denom
    return Point(l1.origin.x + t * d1x, l1.origin.y + t * d1y)


# ---------------------------------------------------------------------------
# Точка Ферма–Торричелли
# ---------------------------------------------------------------------------

def fermat_point(a: Point, b: Point, c: Point) -> FermatResult:
    """
    Точка Ферма–Торричелли треугольника abc.

    В невырожденном случае это первый изогонический центр: пересечение прямых Симсона
    (вершина — вершина правильного треугольника на противоположной стороне). В барицентрических
    координатах он равен (|bc|/sin(A+π/3) : |ca|/sin(B+π/3) : |ab|/sin(C+π/3)).

    :raises InvalidInputError: если вершины совпадают.
    """
    pts = (a, b, c)
    for i in range(3):
        for j in range(i + 1, 3):
            if pts[i] == pts[j]:
                raise InvalidInputError("Вершины треугольника совпадают", "points", pts[i].as_tuple())

    angles = (angle_at(a, b, c), angle_at(b, c, a), angle_at(c, a, b))
    i_max = max(range(3), key=lambda i: angles[i])
    if angles[i_max] >= TWO_PI_3 - DEGENERACY_SLACK:
        v = pts[i_max]
        length = sum(v.distance_to(p) for p in pts)
        return FermatResult(point=v, degenerate=True, tripod_length=length, attained_at_vertex=i_max)

    sides = (b.distance_to(c), c.distance_to(a), a.distance_to(b))
    weights = [s / math.sin(ang + math.pi / 3.0) for s, ang in zip(sides, angles)]
    total = sum(weights)
    point = Point(sum(w * p.x for w, p in zip(weights, pts)) / total,
                  sum(w * p.y for w, p in zip(weights, pts)) / total)
    return FermatResult(point=point, degenerate=False, tripod_length=sum(point.distance_to(p) for p in pts))


def fermat_points(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """
    Векторизованная точка Ферма для массивов треугольников формы (..., 2).
    Если две вершины совпадают, возвращается совпавшая точка.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    ab, ac, bc = b - a, c - a, c - b
    la = np.hypot(bc[..., 0], bc[..., 1])
    lb = np.hypot(ac[..., 0], ac[..., 1])
    lc = np.hypot(ab[..., 0], ab[..., 1])
    cross = np.abs(ab[..., 0] * ac[..., 1] - ab[..., 1] * ac[..., 0])
    ang_a = np.arctan2(cross, (ab * ac).sum(axis=-1))
    ang_b = np.arctan2(cross, -(ab * bc).sum(axis=-1))
    ang_c = np.arctan2(cross, (ac * bc).sum(axis=-1))

    with np.errstate(divide="ignore", invalid="ignore"):
        wa = la / np.sin(ang_a + math.pi / 3.0)
        wb = lb / np.sin(ang_b + math.pi / 3.0)
        wc = lc / np.sin(ang_c + math.pi / 3.0)
        interior = (wa[..., None] * a + wb[..., None] * b + wc[..., None] * c) / (wa + wb + wc)[..., None]

    angles = np.stack([ang_a, ang_b, ang_c], axis=-1)
    i_max = np.argmax(angles, axis=-1)
    vertex = np.where((i_max == 0)[..., None], a, np.where((i_max == 1)[..., None], b, c))
    degenerate = np.take_along_axis(angles, i_max[..., None], axis=-1)[..., 0] >= TWO_PI_3 - DEGENERACY_SLACK

    result = np.where(degenerate[..., None], vertex, interior)
    result = np.where(((lb == 0.0) | (lc == 0.0))[..., None], a, result)
    result = np.where(((la == 0.0) & (lb != 0.0) & (lc != 0.0))[..., None], b, result)
    return result


def geometric_median4(q: np.ndarray) -> np.ndarray:
    """
    Геометрическая медиана четырех точек, q формы (..., 4, 2).
    Кандидаты: сами точки и пересечения трех пар прямых (для выпуклого четырехугольника —
    пересечение диагоналей); выбирается кандидат с наименьшей суммой расстояний.
    """
    q = np.asarray(q, dtype=float)
    candidates = [q[..., i, :] for i in range(4)]
    for (i, j), (k, l) in (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))):
        p1, p3 = q[..., i, :], q[..., k, :]
        d1 = q[..., j, :] - p1
        d2 = q[..., l, :] - p3
        denom = d1[..., 0] * d2[..., 1] - d1[..., 1] * d2[..., 0]
        w = p3 - p1
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (w[..., 0] * d2[..., 1] - w[..., 1] * d2[..., 0]) / denom
            x = p1 + t[..., None] * d1
        candidates.append(np.where(np.isfinite(x).all(axis=-1)[..., None], x, p1))
    cand = np.stack(candidates, axis=-2)
    cost = np.linalg.norm(cand[..., :, None, :] - q[..., None, :, :], axis=-1).sum(axis=-1)
    best = np.argmin(cost, axis=-1)
    return np.take_along_axis(cand, best[..., None, None], axis=-2)[..., 0, :]


# ---------------------------------------------------------------------------
# Теорема Вивиани
# ---------------------------------------------------------------------------

def distance_sum_to_sides(p: Point, equilateral: tuple[Point, Point, Point]) -> float:
    """
    Сумма расстояний от точки замкнутого правильного треугольника до прямых его сторон.

    :raises InvalidInputError: треугольник не правильный (1e−9 относительно) или точка снаружи.
    """
    v0, v1, v2 = equilateral
    sides = (v1.distance_to(v2), v2.distance_to(v0), v0.distance_to(v1))
    longest = max(sides)
    if min(sides) == 0.0 or longest - min(sides) > 1e-9 * longest:
        raise InvalidInputError("Треугольник не правильный", "sides", sides)
    orientation = _sign((v1.x - v0.x) * (v2.y - v0.y) - (v1.y - v0.y) * (v2.x - v0.x))

    total = 0.0
    for u, w in ((v0, v1), (v1, v2), (v2, v0)):
        signed = orientation * ((w.x - u.x) * (p.y - u.y) - (w.y - u.y) * (p.x - u.x)) / u.distance_to(w)
        if signed < -1e-12 * longest:
            raise InvalidInputError("Точка лежит вне треугольника", "p", p.as_tuple())
        total += abs(signed)
    return total
