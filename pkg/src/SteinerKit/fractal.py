"""
Построение конечных реализаций Σ(Λ), терминалов A_∞(Λ), длин и проверка вложения.
"""
from __future__ import annotations

import logging
import math
from typing import Iterator

import numpy as np

from .common.enums import LambdaKind
from .common.exceptions import DivergenceError, InvalidInputError
from .geometry import TWO_PI_3, angle_at, segments_intersect
from .types import EmbeddedTree, LambdaSequence, Point, Segment, TerminalSet, ValidationReport

logger = logging.getLogger("SteinerKit.fractal")

MAX_TERMINAL_LEVEL = 20
"""Наибольший уровень усечения для terminal_set (2^20 точек)."""

_S = math.sqrt(3.0) / 2.0
# Направления кратны π/3; таблица дает точную зеркальную симметрию cos(−d) = cos(d), sin(−d) = −sin(d).
_DIRECTIONS = np.array([[1.0, 0.0], [0.5, _S], [-0.5, _S], [-1.0, 0.0], [-0.5, -_S], [0.5, -_S]])
_ROUNDING_FACTOR = 64.0 * np.finfo(float).eps


def _levels(seq: LambdaSequence, depth: int) -> Iterator[np.ndarray]:
    """
    Положения вершин уровней 0..depth−1 (уровень ℓ — вершины y_{2^ℓ}, …, y_{2^{ℓ+1}−1} по порядку).
    Левый ребенок y_{2k} повернут на +π/3 относительно ребра родителя, правый — на −π/3.
    """
    positions = np.array([[1.0, 0.0]])
    directions = np.array([0])
    yield positions
    for level in range(1, depth):
        length = seq.edge_length(level)
        directions = np.stack([directions + 1, directions - 1], axis=1).reshape(-1) % 6
        positions = np.repeat(positions, 2, axis=0) + length * _DIRECTIONS[directions]
        yield positions


def build_sigma(seq: LambdaSequence, depth: int) -> EmbeddedTree:
    """
    Реализация Σ(Λ) глубины depth: вершины y_0, …, y_{2^depth − 1}, ребра y_0y_1 и y_ky_{2k}, y_ky_{2k+1}.

    :raises InvalidInputError: depth < 1 или в явной последовательности не хватает λ_i.
    """
    if not isinstance(depth, int) or depth < 1:
        raise InvalidInputError("Глубина должна быть не меньше 1", "depth", depth)
    vertices: dict[int, Point] = {0: Point(0.0, 0.0)}
    edges: list[tuple[int, int]] = [(0, 1)]
    for level, positions in enumerate(_levels(seq, depth)):
        base = 1 << level
        for i, (x, y) in enumerate(positions.tolist()):
            vertices[base + i] = Point(x, y)
        if level:
            edges.extend(((base + i) >> 1, base + i) for i in range(base))
    return EmbeddedTree(sequence=seq, depth=depth, vertices=vertices, edges=tuple(edges))


def level_points(seq: LambdaSequence, level: int) -> np.ndarray:
    """Массив (2^level, 2) положений вершин одного уровня."""
    if level < 0:
        raise InvalidInputError("Отрицательный уровень", "level", level)
    positions = None
    for positions in _levels(seq, level + 1):
        pass
    return positions


def terminal_set(seq: LambdaSequence, tol: float, includes_root: bool = True) -> TerminalSet:
    """
    Конечное приближение A_∞(Λ): листья уровня N, где N — наименьший уровень с хвостом
    L_{N+1}/(1 − max λ_i) < tol.

    :raises InvalidInputError: tol ≤ 0, точность недостижима до MAX_TERMINAL_LEVEL
        или явная последовательность слишком короткая.
    """
    if not (isinstance(tol, (int, float)) and tol > 0):
        raise InvalidInputError("Допуск должен быть положительным", "tol", tol)
    q = seq.ratio_bound
    for level in range(1, MAX_TERMINAL_LEVEL + 1):
        tail = seq.edge_length(level + 1) / (1.0 - q)
        if tail < tol:
            break
    else:
        raise InvalidInputError("Точность недостижима при разумном числе терминалов", "tol", tol)

    points = [Point(x, y) for x, y in level_points(seq, level).tolist()]
    if includes_root:
        points.insert(0, Point(0.0, 0.0))
    logger.debug(f"Терминалы: уровень {level}, точек {len(points)}, хвост {tail:.3e}")
    return TerminalSet(points=tuple(points), includes_root=includes_root, tolerance=tail, level=level)


def total_length(seq: LambdaSequence | float, depth: int | float) -> float:
    """
    Длина Σ(Λ) глубины depth: Σ_{i<depth} 2^i ∏_{j<i} λ_j; при depth = ∞ и постоянном λ — 1/(1 − 2λ).

    :param seq: последовательность или число λ > 0 (число допускает и λ ≥ 1/2).
    :raises DivergenceError: depth = ∞ и 2λ ≥ 1.
    """
    if isinstance(seq, LambdaSequence):
        ratio = seq.effective
        constant = seq.values[0] if seq.kind is LambdaKind.CONSTANT else None
    else:
        lam = float(seq)
        if not (math.isfinite(lam) and lam > 0.0):
            raise InvalidInputError("λ должно быть положительным", "lambda", seq)

        def ratio(_i: int) -> float:
            return lam

        constant = lam

    if depth == math.inf:
        if constant is None:
            raise InvalidInputError("Бесконечная длина определена только для постоянной λ", "depth", depth)
        if 2.0 * constant >= 1.0:
            raise DivergenceError(constant)
        return 1.0 / (1.0 - 2.0 * constant)
    if int(depth) != depth or depth < 1:
        raise InvalidInputError("Глубина должна быть целой и не меньше 1", "depth", depth)

    total, edge = 0.0, 1.0
    for i in range(int(depth)):
        total += 2.0 ** i * edge
        edge *= ratio(i)
    return total


def epsilon_of(lam: float) -> float:
    """ε = λ²/(1 − λ): радиус шара, содержащего всех потомков вершины уровня 1."""
    if not (0.0 < lam < 1.0):
        raise InvalidInputError("λ должно лежать в (0, 1)", "lambda", lam)
    return lam * lam / (1.0 - lam)


def hausdorff_dimension_formula(lam: float) -> float:
    """−ln 2 / ln λ."""
    if not (0.0 < lam < 0.5):
        raise InvalidInputError("λ должно лежать в (0, 1/2)", "lambda", lam)
    return -math.log(2.0) / math.log(lam)


def mirror_index(k: int) -> int:
    """Индекс зеркального (относительно оси x) образа y_k."""
    if k <= 1:
        return k
    return k ^ ((1 << EmbeddedTree.level(k)) - 1)


def descendant_radius(seq: LambdaSequence, k: int) -> float:
    """Радиус шара с центром y_k, содержащего всех потомков y_k (и предельные точки)."""
    level = EmbeddedTree.level(k)
    return seq.edge_length(level + 1) / (1.0 - seq.ratio_bound)


def validate_embedding(tree: EmbeddedTree, tolerance: float = 1e-9) -> ValidationReport:
    """
    Проверка вложения: пересечения ребер, углы ветвления 2π/3 и отношения длин уровней λ_i.
    Отклонения углов и отношений сравниваются с допуском после вычета погрешности
    округления координат (порядка ulp(координаты)/длина ребра).

    Ребра короче погрешности округления (при малых λ на глубоких уровнях концы совпадают
    в double) не различимы: они исключаются из поиска пересечений и считаются в unresolved_edges.
    """
    vertices = tree.vertices
    edges = list(tree.edges)
    resolved = [e for e in edges if not _is_unresolved(vertices[e[0]], vertices[e[1]])]
    crossings = _find_crossings(vertices, resolved)

    max_angle_dev = angle_excess = 0.0
    for k in tree.internal():
        if 2 * k + 1 not in vertices:
            continue
        centre = vertices[k]
        nbrs = [vertices[k >> 1], vertices[2 * k], vertices[2 * k + 1]]
        allowance = _rounding_allowance(centre, nbrs)
        if math.isinf(allowance):
            continue
        for i in range(3):
            for j in range(i + 1, 3):
                dev = abs(angle_at(centre, nbrs[i], nbrs[j]) - TWO_PI_3)
                max_angle_dev = max(max_angle_dev, dev)
                angle_excess = max(angle_excess, dev - allowance)

    max_ratio_dev = ratio_excess = 0.0
    for k in range(2, 1 << tree.depth):
        parent, grand = k >> 1, k >> 2
        child_len = vertices[k].distance_to(vertices[parent])
        parent_len = vertices[parent].distance_to(vertices[grand])
        if parent_len == 0.0:
            continue
        expected = tree.sequence.effective(EmbeddedTree.level(k) - 1)
        dev = abs(child_len / parent_len / expected - 1.0)
        allowance = _rounding_allowance(vertices[parent], [vertices[k], vertices[grand]])
        max_ratio_dev = max(max_ratio_dev, dev)
        ratio_excess = max(ratio_excess, dev - allowance)

    report = ValidationReport(
        crossings=tuple(crossings),
        max_angle_deviation=max_angle_dev,
        max_ratio_deviation=max_ratio_dev,
        angle_excess=max(angle_excess, 0.0),
        ratio_excess=max(ratio_excess, 0.0),
        tolerance=tolerance,
        unresolved_edges=len(edges) - len(resolved),
    )
    if report.unresolved_edges:
        logger.debug(f"Ребер ниже разрешения double: {report.unresolved_edges}")
    if not report.valid:
        logger.warning(f"Вложение некорректно: пересечений {len(crossings)}, "
                       f"угол {report.angle_excess:.2e}, отношение {report.ratio_excess:.2e}")
    return report


def _rounding_allowance(centre: Point, others: list[Point]) -> float:
    scale = max([1.0, abs(centre.x), abs(centre.y)] + [max(abs(p.x), abs(p.y)) for p in others])
    shortest = min(centre.distance_to(p) for p in others)
    if shortest == 0.0:
        return math.inf
    return _ROUNDING_FACTOR * scale / shortest


def _is_unresolved(a: Point, b: Point) -> bool:
    scale = max(1.0, abs(a.x), abs(a.y), abs(b.x), abs(b.y))
    return a.distance_to(b) <= _ROUNDING_FACTOR * scale


def _find_crossings(vertices: dict[int, Point], edges: list[tuple[int, int]]):
    if not edges:
        return []
    segments = [Segment(vertices[a], vertices[b]) for a, b in edges]
    ends = np.array([[s.a.x, s.a.y, s.b.x, s.b.y] for s in segments])
    lo = np.minimum(ends[:, :2], ends[:, 2:])
    hi = np.maximum(ends[:, :2], ends[:, 2:])
    crossings = []
    for i in range(len(edges)):
        overlap = np.all((lo[i + 1:] <= hi[i]) & (hi[i + 1:] >= lo[i]), axis=1)
        for j in (np.nonzero(overlap)[0] + i + 1).tolist():
            common = set(edges[i]) & set(edges[j])
            shared = vertices[common.pop()] if common else None
            if segments_intersect(segments[i], segments[j], shared):
                crossings.append((edges[i], edges[j]))
    return crossings
