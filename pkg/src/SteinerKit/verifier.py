"""
Численная проверка лемм 0, 1, 2, теоремы о длине Σ(λ) и размерности множества терминалов.
"""
from __future__ import annotations

import logging
import math
from typing import Any

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .common.exceptions import InvalidInputError
from .fractal import build_sigma, epsilon_of, total_length
from .geometry import line_intersection, reflect
from .solver import melzak3, solve_steiner
from .types import (Line, LambdaSequence, LemmaOneConstruction, LemmaReport, LemmaTwoScenario, LemmaZeroBounds,
                    LemmaZeroItem, Point, SolveOptions, TheoremReport)

logger = logging.getLogger("SteinerKit.verifier")

SQRT3 = math.sqrt(3.0)
DECOMPOSITION_TOLERANCE = 1e-8
MIRROR_TOLERANCE = 1e-10
CONTACT_TOLERANCE = 1e-8
VERTEX_TOLERANCE = 1e-7
MAX_THEOREM_DEPTH = 4

# (радиус в долях ε, угол в градусах) точек b_1 внутри B_ε(B_1); c_1 — их отражения
_BALL_SAMPLES = {
    1: ((0.0, 0.0),),
    2: ((0.5, 150.0), (0.7, 320.0)),
    3: ((0.5, 150.0), (0.7, 320.0), (0.6, 230.0)),
}


def _log_check(name: str, passed: bool):
    logger.info(f"Проверка {name}: {'пройдена' if passed else 'НЕ пройдена'}")


# ---------------------------------------------------------------------------
# Лемма 0
# ---------------------------------------------------------------------------

def _lemma0_item(lam: float, eps: float, base: float, base_to_b: float) -> LemmaZeroItem:
    tripod_upper = base + 2.0 * lam + 20.0 * eps
    two_seg_lower = base_to_b + SQRT3 * lam - 30.0 * eps
    relaxed_lower = base + (0.5 + SQRT3) * lam - 30.0 * eps
    relaxed_margin = relaxed_lower - tripod_upper
    return LemmaZeroItem(
        base=base,
        tripod_upper=tripod_upper,
        two_seg_lower=two_seg_lower,
        relaxed_lower=relaxed_lower,
        margin=two_seg_lower - tripod_upper,
        relaxed_margin=relaxed_margin,
        passed=relaxed_margin > 0.0,
    )


def _sample_circles(y: Point, b: Point, c: Point, eps: float, item: LemmaZeroItem,
                    angles: int = 12) -> tuple[float, bool]:
    """
    B′, C′ на окружностях радиусов ε и 10ε вокруг B, C: наибольшее |Δ| длины трипода
    и выполнение оценок трипода сверху и двухзвенного пути снизу.
    """
    base = melzak3(y, b, c).length
    slack = 1e-12 * max(1.0, item.base)
    theta = 2.0 * math.pi * np.arange(angles) / angles
    worst, ok = 0.0, True
    for rb in (eps, 10.0 * eps):
        for rc in (eps, 10.0 * eps):
            for tb in theta:
                b2 = Point(b.x + rb * math.cos(tb), b.y + rb * math.sin(tb))
                for tc in theta + math.pi / angles:
                    c2 = Point(c.x + rc * math.cos(tc), c.y + rc * math.sin(tc))
                    length = melzak3(y, b2, c2).length
                    worst = max(worst, abs(length - base))
                    two_segment = min(y.distance_to(b2), y.distance_to(c2)) + b2.distance_to(c2)
                    ok &= length <= item.tripod_upper + slack and two_segment >= item.two_seg_lower - slack
    return worst, ok


def check_lemma0(lam: float) -> LemmaZeroBounds:
    """
    Неравенства леммы 0: оценка трипода сверху 1 + 2λ + 20ε против оценки двухзвенной сети снизу
    (пункт (i), база 1; пункт (ii), база 1/4), неравенство перестройки 2πε + 9ε < 18ε
    и |Δ| ≤ 20ε на сдвигах B, C по окружностям радиусов ε и 10ε.
    """
    eps = epsilon_of(lam)
    y = Point(0.0, 0.0)
    item_i = _lemma0_item(lam, eps, 1.0, math.sqrt(1.0 + lam + lam * lam))
    item_ii = _lemma0_item(lam, eps, 0.25, math.sqrt(1.0 / 16.0 + lam / 4.0 + lam * lam))

    delta_bound = 20.0 * eps
    max_delta, sampled_ok = 0.0, True
    for item in (item_i, item_ii):
        b = Point(item.base + lam / 2.0, SQRT3 * lam / 2.0)
        c = Point(b.x, -b.y)
        worst, ok = _sample_circles(y, b, c, eps, item)
        max_delta = max(max_delta, worst)
        sampled_ok &= ok
    sampled_ok &= max_delta <= delta_bound * (1.0 + 1e-12)

    gain, cost = 18.0 * eps, (2.0 * math.pi + 9.0) * eps
    bounds = LemmaZeroBounds(
        lam=lam,
        eps=eps,
        item_i=item_i,
        item_ii=item_ii,
        surgery_gain=gain,
        surgery_cost=cost,
        surgery_margin=gain - cost,
        surgery_passed=cost < gain,
        max_abs_delta=max_delta,
        delta_bound=delta_bound,
        sampled_bounds_passed=bool(sampled_ok),
        passed=bool(item_i.passed and item_ii.passed and cost < gain and sampled_ok),
    )
    _log_check("lemma0", bounds.passed)
    return bounds


def lemma0_threshold() -> float:
    """λ*, при котором запас (√3 − 3/2)λ − 50ε(λ) обращается в ноль."""
    def margin(lam: float) -> float:
        return (SQRT3 - 1.5) * lam - 50.0 * epsilon_of(lam)

    return float(brentq(margin, 1.0 / 300.0, 1.0 / 15.0, xtol=1e-15))


# ---------------------------------------------------------------------------
# Лемма 1
# ---------------------------------------------------------------------------

def build_lemma1(lam: float) -> LemmaOneConstruction:
    """
    Построение леммы 1: правильный треугольник DEF высоты |Y_1F| = 1 + 3λ/2 с серединой DE в Y_1,
    Z = DF ∩ T_1B_1 и отрезок [Z_lZ_r] длины λ на DF; V-точки — отражения относительно оси.
    """
    if not (0.0 < lam < 0.25):
        raise InvalidInputError("λ должно лежать в (0, 1/4)", "lambda", lam)
    axis = Line.x_axis()
    y1, t1 = Point(0.0, 0.0), Point(1.0, 0.0)
    b1 = Point(1.0 + lam / 2.0, SQRT3 * lam / 2.0)
    c1 = reflect(b1, axis)
    height = 1.0 + 1.5 * lam
    side = 2.0 * height / SQRT3
    f, d, e = Point(height, 0.0), Point(0.0, side / 2.0), Point(0.0, -side / 2.0)

    z = line_intersection(Line.through(d, f), Line.through(t1, b1))
    ux, uy = Line.through(d, f).direction
    half = lam / 2.0
    z_l = Point(z.x - half * ux, z.y - half * uy)
    z_r = Point(z.x + half * ux, z.y + half * uy)

    expected = (
        (z, (1.0 + 3.0 * lam / 8.0, 3.0 * SQRT3 * lam / 8.0)),
        (z_l, (1.0 + 3.0 * lam / 8.0 - SQRT3 * lam / 4.0, 3.0 * SQRT3 * lam / 8.0 + lam / 4.0)),
        (z_r, (1.0 + 3.0 * lam / 8.0 + SQRT3 * lam / 4.0, 3.0 * SQRT3 * lam / 8.0 - lam / 4.0)),
    )
    error = max(math.dist(p.as_tuple(), q) for p, q in expected)
    return LemmaOneConstruction(
        lam=lam, y1=y1, t1=t1, b1=b1, c1=c1, d=d, e=e, f=f,
        z=z, z_l=z_l, z_r=z_r,
        v=reflect(z, axis), v_l=reflect(z_l, axis), v_r=reflect(z_r, axis),
        axis=axis, closed_form_error=error,
    )


def _tree_length(points: list[Point], opts: SolveOptions | None) -> float:
    if len(points) == 2:
        return points[0].distance_to(points[1])
    if len(points) == 3:
        return melzak3(*points).length
    return solve_steiner(points, opts).length


def _attach_to_segment(p: Point, q: Point, cluster: list[Point],
                       opts: SolveOptions | None) -> tuple[float, Point]:
    """Минимальная сеть, соединяющая отрезок [pq] с cluster: минимум по точке присоединения."""
    def at(t: float) -> Point:
        return Point(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y))

    result = minimize_scalar(lambda t: _tree_length([at(t), *cluster], opts), bounds=(0.0, 1.0),
                             method="bounded", options={"xatol": 1e-12})
    return float(result.fun), at(float(result.x))


def check_lemma1_decomposition(lam: float, samples_per_ball: int = 1,
                               opts: SolveOptions | None = None) -> LemmaReport:
    """
    Равенство H(S) = H(S_mid) + H(S_up) + H(S_down) для {Y_1} ∪ b_1 ∪ c_1, где b_1 — точки
    в B_ε(B_1), c_1 — их отражения. S_up и S_down присоединяются к отрезкам [Z_lZ_r], [V_lV_r],
    S_mid — трипод из Y_1 в точки присоединения. Дополнительно: отраженное решение и решение
    для переставленных терминалов имеют ту же длину.
    """
    if samples_per_ball not in _BALL_SAMPLES:
        raise InvalidInputError("samples_per_ball должно быть 1, 2 или 3", "samples_per_ball", samples_per_ball)
    lemma = build_lemma1(lam)
    eps = epsilon_of(lam)
    b1 = [Point(lemma.b1.x + r * eps * math.cos(math.radians(a)), lemma.b1.y + r * eps * math.sin(math.radians(a)))
          for r, a in _BALL_SAMPLES[samples_per_ball]]
    c1 = [reflect(p, lemma.axis) for p in b1]

    full = solve_steiner([lemma.y1, *b1, *c1], opts)
    up, x_up = _attach_to_segment(lemma.z_l, lemma.z_r, b1, opts)
    down, x_down = _attach_to_segment(lemma.v_l, lemma.v_r, c1, opts)
    mid = melzak3(lemma.y1, x_up, x_down).length
    parts = up + mid + down
    decomposition_gap = abs(full.length - parts)

    mirrored = [reflect(full.position(i), lemma.axis) for i in range(2 * full.topology.n - 2)]
    mirror_length = sum(mirrored[i].distance_to(mirrored[j]) for i, j in full.topology.edges)
    permuted = solve_steiner([lemma.y1, *c1, *b1], opts).length
    mirror_gap = max(abs(mirror_length - full.length), abs(permuted - full.length))

    passed = decomposition_gap <= DECOMPOSITION_TOLERANCE and mirror_gap <= MIRROR_TOLERANCE
    _log_check("lemma1_decomposition", passed)
    return LemmaReport(
        name="lemma1_decomposition",
        inputs={"lambda": lam, "samples_per_ball": samples_per_ball},
        computed_values={
            "full_length": full.length,
            "up_length": up,
            "mid_length": mid,
            "down_length": down,
            "parts_sum": parts,
            "attach_up": list(x_up.as_tuple()),
            "attach_down": list(x_down.as_tuple()),
            "mirror_length": mirror_length,
            "permuted_length": permuted,
            "topology_id": full.topology.canonical_id,
        },
        margins={"decomposition": DECOMPOSITION_TOLERANCE - decomposition_gap,
                 "mirror": MIRROR_TOLERANCE - mirror_gap},
        passed=passed,
        tolerances={"decomposition": DECOMPOSITION_TOLERANCE, "mirror": MIRROR_TOLERANCE},
    )


# ---------------------------------------------------------------------------
# Лемма 2
# ---------------------------------------------------------------------------

def _lemma2_points(lam: float) -> tuple[Point, Point, Point, Point, Point, Point]:
    y2, t2 = Point(0.0, 0.0), Point(0.25, 0.0)
    b2 = Point(0.25 + lam / 2.0, SQRT3 * lam / 2.0)
    return y2, t2, b2, Point(b2.x, -b2.y), Point(0.0, 0.5), Point(0.0, -0.5)


def _path_length(*points: Point) -> float:
    return sum(p.distance_to(q) for p, q in zip(points, points[1:]))


def check_lemma2_shift(lam: float, h: float) -> LemmaTwoScenario:
    """
    Сеть S, ствол которой касается [Y_upY_down] на смещении h от Y_2, и два конкурента:
    S_1 (нижняя половина S и ее отражение) и S_2 (верхняя половина и ее отражение).
    Длины считаются по явным отрезкам; H_S = (H_S1 + H_S2)/2.
    """
    if not (0.0 < lam < 0.5):
        raise InvalidInputError("λ должно лежать в (0, 1/2)", "lambda", lam)
    if not (math.isfinite(h) and abs(h) <= lam):
        raise InvalidInputError("Смещение должно удовлетворять |h| ≤ λ", "h", h)
    y2, t2, b2, c2, y_up, y_down = _lemma2_points(lam)
    a = abs(h)
    stem_end = Point(0.25 - a / SQRT3, a)
    p_b = Point(0.25, 2.0 * a)
    h_s = (_path_length(Point(0.0, a), stem_end, t2, c2)
           + _path_length(stem_end, p_b, b2))
    h_s1 = _path_length(y2, t2, b2) + t2.distance_to(c2)
    fork = Point(0.25 - 2.0 * a / SQRT3, 0.0)
    p_c = Point(0.25, -2.0 * a)
    h_s2 = (y2.distance_to(fork)
            + _path_length(fork, p_b, b2)
            + _path_length(fork, p_c, c2))
    scenario = LemmaTwoScenario(lam=lam, h=h, y2=y2, t2=t2, b2=b2, c2=c2, y_up=y_up, y_down=y_down,
                                h_s=h_s, h_s1=h_s1, h_s2=h_s2)
    logger.debug(f"Лемма 2: h={h:.3e}, H_S={h_s:.15f}, H_S1={h_s1:.15f}, H_S2={h_s2:.15f}")
    return scenario


def find_optimal_contact(lam: float, grid: int = 16) -> LemmaReport:
    """
    Точка касания h* сети {B_2, C_2} с прямой Y_upY_down: минимум длины трипода
    (0, h), B_2, C_2 по h ∈ [−λ, λ]. Производная по h — y-компонента единичного вектора
    от точки Штейнера к (0, h); корень отделяется на сетке и уточняется методом Брента.
    """
    _, _, b2, c2, _, _ = _lemma2_points(lam)

    def slope(h: float) -> float:
        tripod = melzak3(Point(0.0, h), b2, c2)
        s = tripod.steiner_points[0]
        return (h - s.y) / math.hypot(s.x, h - s.y)

    knots = np.linspace(-lam, lam, grid)
    values = [slope(h) for h in knots]
    bracket = next(((knots[i], knots[i + 1]) for i in range(grid - 1) if values[i] * values[i + 1] <= 0.0), None)
    if bracket is None:
        raise InvalidInputError("Производная не меняет знак на [−λ, λ]", "lambda", lam)
    h_star = float(brentq(slope, *bracket, xtol=1e-15))
    length = melzak3(Point(0.0, h_star), b2, c2).length
    passed = abs(h_star) <= CONTACT_TOLERANCE
    _log_check("lemma2_contact", passed)
    return LemmaReport(
        name="lemma2_contact",
        inputs={"lambda": lam},
        computed_values={"h_star": h_star, "length": length},
        margins={"h_star": CONTACT_TOLERANCE - abs(h_star)},
        passed=passed,
        tolerances={"h_star": CONTACT_TOLERANCE},
    )


def _lemma2_grid_report(lam: float, points: int = 9) -> LemmaReport:
    scenarios = [check_lemma2_shift(lam, float(h)) for h in np.linspace(-lam, lam, points)]
    reports = [s.to_report() for s in scenarios]
    worst = max(s.averaging_error for s in scenarios)
    passed = all(r.passed for r in reports)
    _log_check("lemma2_shift", passed)
    return LemmaReport(
        name="lemma2_shift",
        inputs={"lambda": lam, "h": [s.h for s in scenarios]},
        computed_values={"scenarios": [{"h": s.h, **r.computed_values} for s, r in zip(scenarios, reports)]},
        margins={"averaging": reports[0].tolerances["averaging"] - worst},
        passed=passed,
        tolerances=reports[0].tolerances,
    )


# ---------------------------------------------------------------------------
# Теорема
# ---------------------------------------------------------------------------

def check_theorem(lam: float, depth: int, opts: SolveOptions | None = None) -> TheoremReport:
    """
    Длина усечения Σ(λ) глубины depth против точного решения для {y_0} ∪ {листья усечения}.
    Дополнительно: частичные суммы Σ_{i<k} (2λ)^i и расстояние от вершин ветвления Σ(λ)
    до ближайших точек Штейнера найденного дерева.
    """
    if not isinstance(depth, int) or not 2 <= depth <= MAX_THEOREM_DEPTH:
        raise InvalidInputError(f"Глубина должна лежать в [2, {MAX_THEOREM_DEPTH}]", "depth", depth)
    seq = LambdaSequence.constant(lam)
    tree = build_sigma(seq, depth)
    terminals = [tree.point(0)] + [tree.point(k) for k in tree.leaves()]
    # само усечение — дерево на этих терминалах, его длина годится как стартовый рекорд
    realized = sum(tree.point(a).distance_to(tree.point(b)) for a, b in tree.edges)
    opts = (opts or SolveOptions()).model_copy(update={"upper_bound": realized * (1.0 + 1e-12)})
    solution = solve_steiner(terminals, opts)

    truncation = total_length(seq, depth)
    gap = abs(truncation - solution.length) / solution.length
    steiner = np.array([p.as_tuple() for p in solution.steiner_points])
    deviation = max(float(np.min(np.hypot(*(steiner - tree.point(k).as_tuple()).T))) for k in tree.internal())
    partial = [sum((2.0 * lam) ** i for i in range(k)) for k in range(1, depth + 1)]
    tolerance = TheoremReport.model_fields["tolerance"].default

    report = TheoremReport(
        lam=lam,
        depth=depth,
        n_terminals=len(terminals),
        truncation_length=truncation,
        oracle_length=solution.length,
        relative_gap=gap,
        per_step_lower_bounds=partial,
        vertex_deviation=deviation,
        topology_id=solution.topology.canonical_id,
        ties=list(solution.ties),
        tolerance=tolerance,
        passed=gap < tolerance and deviation <= VERTEX_TOLERANCE,
    )
    _log_check(f"theorem(depth={depth})", report.passed)
    return report


# ---------------------------------------------------------------------------
# Размерность
# ---------------------------------------------------------------------------

def estimate_dimension(points, scales) -> float:
    """
    Оценка размерности подсчетом клеток: наклон МНК-прямой log N(s) от log(1/s),
    N(s) — число занятых клеток сетки с шагом s, привязанной к началу координат.

    :raises InvalidInputError: пустое множество точек или меньше двух различных положительных масштабов.
    """
    if isinstance(points, np.ndarray):
        coords = np.asarray(points, dtype=float).reshape(-1, 2)
    else:
        coords = np.array([p.as_tuple() if isinstance(p, Point) else tuple(p) for p in points], dtype=float)
    if not len(coords):
        raise InvalidInputError("Пустое множество точек")
    sizes = np.asarray(list(scales), dtype=float)
    if sizes.size == 0 or not np.all(np.isfinite(sizes) & (sizes > 0)):
        raise InvalidInputError("Масштабы должны быть положительными", "scales", list(scales))
    if np.unique(sizes).size < 2:
        raise InvalidInputError("Нужны хотя бы два различных масштаба", "scales", list(scales))

    counts = np.array([len(np.unique(np.floor(coords / s).astype(np.int64), axis=0)) for s in sizes])
    slope = np.polyfit(np.log(1.0 / sizes), np.log(counts), 1)[0]
    logger.debug(f"Подсчет клеток: {dict(zip(sizes.tolist(), counts.tolist()))}, наклон {slope:.6f}")
    return float(slope)


# ---------------------------------------------------------------------------
# Пакет проверок
# ---------------------------------------------------------------------------

def run_verification(lam: float, samples_per_ball: int = 2, opts: SolveOptions | None = None) -> dict[str, Any]:
    """
    Все проверки для одного λ: лемма 0, построение и разложение леммы 1, лемма 2 на сетке h,
    точка касания h*. Возвращает сериализуемый отчет с общим флагом и списком непрошедших проверок.
    """
    LambdaSequence.constant(lam)
    reports = [
        check_lemma0(lam).to_report(),
        build_lemma1(lam).to_report(),
        check_lemma1_decomposition(lam, samples_per_ball, opts),
        _lemma2_grid_report(lam),
        find_optimal_contact(lam),
    ]
    failed = [r.name for r in reports if not r.passed]
    return {
        "lambda": lam,
        "lambda_star": lemma0_threshold(),
        "checks": [r.to_dict() for r in reports],
        "failed": failed,
        "pass": not failed,
    }
