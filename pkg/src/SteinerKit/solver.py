"""
Точное решение евклидовой задачи Штейнера для малых наборов терминалов:
перебор полных топологий и геометрическая оптимизация каждой.
"""
from __future__ import annotations

import logging
import math
import os
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor

import networkx as nx
import numpy as np

from .common.exceptions import InvalidInputError, SolverFailureError
from .geometry import fermat_point, fermat_points, geometric_median4
from .types import Point, SolveOptions, SteinerSolution, Topology

logger = logging.getLogger("SteinerKit.solver")

MIN_TERMINALS = 3
MAX_TERMINALS = 10
COLLAPSE_TOL = 1e-9
"""Допуск совпадения узлов в нормированных координатах (диаметр терминалов 1)."""

_LB_INTERVAL = 8
_SNAP_LEVELS = (1e-7, 1e-5, 1e-3)
_TAIL_MIN_SWEEPS = 64
_TAIL_FACTOR = 100.0
_PRUNE_SLACK = 1e-9
_POLISH_WINDOW = 1e-7
_CANDIDATES_PER_CHUNK = 16

_ACTIVE, _CONVERGED, _PRUNED, _EXHAUSTED = 0, 1, 2, 3


# ---------------------------------------------------------------------------
# Топологии
# ---------------------------------------------------------------------------

class TopologySet(Sequence):
    """
    Список полных топологий, хранящийся компактно: массив ребер (count, 2n−3, 2).
    Элементы создаются по запросу; canonical_id — позиция в перечислении.
    """

    def __init__(self, n: int, edges: np.ndarray):
        self.n = n
        self.edges = edges

    def __len__(self):
        return len(self.edges)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return [self[i] for i in range(*index.indices(len(self)))]
        i = range(len(self))[index]
        return Topology(n=self.n, edges=tuple(map(tuple, self.edges[i].tolist())), canonical_id=i)


def enumerate_full_topologies(n: int) -> TopologySet:
    """
    Все полные топологии Штейнера для n терминалов: терминал k вставляется в каждое ребро
    каждой топологии для k − 1 терминалов. Точка Штейнера, созданная при вставке k, получает
    номер n + k − 2. Количество — (2n − 5)!!.

    :raises InvalidInputError: n вне [3, 10].
    """
    if not isinstance(n, int) or not MIN_TERMINALS <= n <= MAX_TERMINALS:
        raise InvalidInputError(f"Число терминалов должно лежать в [{MIN_TERMINALS}, {MAX_TERMINALS}]", "n", n)
    edges = np.array([[[0, n], [1, n], [2, n]]], dtype=np.int16)
    for k in range(3, n):
        m, e, _ = edges.shape
        s = n + k - 2
        grown = np.repeat(edges, e, axis=0)
        rows = np.arange(m * e)
        slot = np.tile(np.arange(e), m)
        tail = grown[rows, slot, 1].copy()
        grown[rows, slot, 1] = s
        extra = np.empty((m * e, 2, 2), dtype=np.int16)
        extra[:, 0, 0] = s
        extra[:, 0, 1] = tail
        extra[:, 1, 0] = s
        extra[:, 1, 1] = k
        edges = np.concatenate([grown, extra], axis=1)
    return TopologySet(n, edges)


# ---------------------------------------------------------------------------
# Вспомогательные функции
# ---------------------------------------------------------------------------

def _as_points(terminals) -> list[Point]:
    return [p if isinstance(p, Point) else Point(*p) for p in terminals]


def _normalise(points: list[Point]) -> tuple[np.ndarray, np.ndarray, float, float]:
    """Перенос центра рамки в 0 и масштаб к единичному диаметру; возвращает и допуск схлопывания."""
    raw = np.array([p.as_tuple() for p in points])
    centre = 0.5 * (raw.min(axis=0) + raw.max(axis=0))
    dist = np.linalg.norm(raw[:, None, :] - raw[None, :, :], axis=-1)
    scale = float(dist.max())
    if scale == 0.0:
        raise InvalidInputError("Все терминалы совпадают")
    normed = (raw - centre) / scale
    np.fill_diagonal(dist, np.inf)
    separation = float(dist.min()) / scale
    if separation < 1e-12:
        raise InvalidInputError("Терминалы совпадают", "separation", separation)
    return normed, centre, scale, min(COLLAPSE_TOL, 1e-4 * separation)


def _neighbor_table(edges: np.ndarray, n: int) -> np.ndarray:
    """Соседи точек Штейнера: массив (m, n − 2, 3)."""
    nodes = np.concatenate([edges[..., 0], edges[..., 1]], axis=1)
    others = np.concatenate([edges[..., 1], edges[..., 0]], axis=1)
    order = np.argsort(nodes, axis=1, kind="stable")
    return np.take_along_axis(others, order, axis=1)[:, n:].reshape(len(edges), n - 2, 3)


def _initial_positions(edges: np.ndarray, terminals: np.ndarray) -> np.ndarray:
    """Начальные точки Штейнера: средние терминалов с весами 2^−(число ребер до терминала)."""
    m, n_edges, _ = edges.shape
    n = len(terminals)
    size = 2 * n - 2
    rows = np.arange(m)
    hops = np.full((m, size, size), np.inf)
    hops[:, np.arange(size), np.arange(size)] = 0.0
    for _ in range(size - 1):
        for e in range(n_edges):
            u, v = edges[:, e, 0], edges[:, e, 1]
            hu, hv = hops[rows, :, u], hops[rows, :, v]
            hops[rows, :, u] = np.minimum(hu, hv + 1.0)
            hops[rows, :, v] = np.minimum(hv, hu + 1.0)
    weights = 2.0 ** -hops[:, n:, :n]
    return weights @ terminals / weights.sum(axis=2, keepdims=True)


def _edge_lengths(positions: np.ndarray, edges: np.ndarray) -> np.ndarray:
    rows = np.arange(len(edges))[:, None]
    diff = positions[rows, edges[..., 0]] - positions[rows, edges[..., 1]]
    return np.hypot(diff[..., 0], diff[..., 1])


def _sweep(positions: np.ndarray, nb: np.ndarray, n: int):
    """Проход Гаусса–Зейделя: каждая точка Штейнера заменяется точкой Ферма своих соседей."""
    rows = np.arange(len(nb))
    for s in range(nb.shape[1]):
        a = positions[rows, nb[:, s, 0]]
        b = positions[rows, nb[:, s, 1]]
        c = positions[rows, nb[:, s, 2]]
        positions[rows, n + s] = fermat_points(a, b, c)


def _merge_collapsed(positions: np.ndarray, edges: np.ndarray, nb: np.ndarray, n: int,
                     lengths: np.ndarray, ctol: float) -> bool:
    """
    Совпавшие смежные точки Штейнера переносятся вместе в геометрическую медиану четырех внешних
    соседей, если это уменьшает длину. Возвращает True, если хоть одна пара сдвинута.
    """
    steiner_pair = (edges[..., 0] >= n) & (edges[..., 1] >= n)
    candidates = steiner_pair & (lengths < ctol)
    moved = False
    for e in np.nonzero(candidates.any(axis=0))[0]:
        sel = np.nonzero(candidates[:, e])[0]
        u, v = edges[sel, e, 0], edges[sel, e, 1]
        nbu, nbv = nb[sel, u - n], nb[sel, v - n]
        outer_u = np.take_along_axis(nbu, np.argsort(nbu == v[:, None], axis=1, kind="stable")[:, :2], axis=1)
        outer_v = np.take_along_axis(nbv, np.argsort(nbv == u[:, None], axis=1, kind="stable")[:, :2], axis=1)
        outer = np.concatenate([outer_u, outer_v], axis=1)
        q = positions[sel[:, None], outer]
        pu, pv = positions[sel, u], positions[sel, v]
        before = (np.linalg.norm(pu[:, None] - q[:, :2], axis=-1).sum(axis=1)
                  + np.linalg.norm(pv[:, None] - q[:, 2:], axis=-1).sum(axis=1)
                  + np.linalg.norm(pu - pv, axis=-1))
        median = geometric_median4(q)
        after = np.linalg.norm(median[:, None] - q, axis=-1).sum(axis=1)
        better = after < before
        if better.any():
            positions[sel[better], u[better]] = median[better]
            positions[sel[better], v[better]] = median[better]
            moved = True
    return moved


def _lower_bounds(positions: np.ndarray, edges: np.ndarray, n: int, ctol: float) -> np.ndarray:
    """
    Нижняя оценка оптимума каждой топологии: L(x*) ≥ L(x) − 2·Σ_{e ∈ Z} ℓ_e − Σ_s |g_s|·D_s.

    Ребра из Z (короче порога) линеаризуются произвольным вектором |z| ≤ 1, что стоит 2ℓ_e
    в константе; g — соответствующий субградиент. D_s — наибольшее расстояние от x_s до терминалов:
    оптимальные точки Штейнера лежат в выпуклой оболочке терминалов. Берется максимум по порогам.
    """
    m = len(edges)
    rows = np.arange(m)
    diff = positions[rows[:, None], edges[..., 0]] - positions[rows[:, None], edges[..., 1]]
    lengths = np.hypot(diff[..., 0], diff[..., 1])
    reach = np.linalg.norm(positions[:, n:, None, :] - positions[:, None, :n, :], axis=-1).max(axis=2)
    bound = np.full(m, -np.inf)
    for snap in sorted({ctol, *_SNAP_LEVELS}):
        bound = np.maximum(bound, _snapped_bound(diff, lengths, lengths < snap, edges, n, reach))
    return bound


def _snapped_bound(diff: np.ndarray, lengths: np.ndarray, zero: np.ndarray, edges: np.ndarray, n: int,
                   reach: np.ndarray) -> np.ndarray:
    m, n_edges, _ = edges.shape
    rows = np.arange(m)
    with np.errstate(divide="ignore", invalid="ignore"):
        unit = np.where(zero[..., None], 0.0, diff / lengths[..., None])
    grad = np.zeros((m, 2 * n - 2, 2))
    np.add.at(grad, (rows[:, None], edges[..., 0]), unit)
    np.add.at(grad, (rows[:, None], edges[..., 1]), -unit)

    slack = np.zeros((m, 2 * n - 2))
    for e in range(n_edges):
        u, v = edges[:, e, 0], edges[:, e, 1]
        z_rows = np.nonzero(zero[:, e])[0]
        if not z_rows.size:
            continue
        uu, vv = u[z_rows], v[z_rows]
        both = (uu >= n) & (vv >= n)
        if both.any():
            r, a, b = z_rows[both], uu[both], vv[both]
            z = 0.5 * (grad[r, b] - grad[r, a])
            z /= np.maximum(np.linalg.norm(z, axis=-1), 1.0)[:, None]
            grad[r, a] += z
            grad[r, b] -= z
        single = ~both
        np.add.at(slack, (z_rows[single], np.where(uu[single] >= n, uu[single], vv[single])), 1.0)

    residual = np.maximum(np.linalg.norm(grad[:, n:], axis=-1) - slack[:, n:], 0.0)
    snapped = np.where(zero, lengths, 0.0).sum(axis=1)
    return lengths.sum(axis=1) - 2.0 * snapped - (residual * reach).sum(axis=1)


def _relax(edges: np.ndarray, terminals: np.ndarray, opts: SolveOptions, incumbent: float, ctol: float,
           history: list[float] | None = None):
    """
    Оптимизация пачки топологий одной размерности. Строки, у которых относительное изменение
    длины за проход меньше convergence_tol, замораживаются. Раз в _LB_INTERVAL проходов строка
    отбрасывается, если ее нижняя оценка выше текущего рекорда либо если даже стократный
    геометрический остаток убывания (по отношению убываний двух последних окон) не доводит
    ее длину до рекорда.
    """
    n = len(terminals)
    m = len(edges)
    edges = edges.astype(np.intp)
    nb = _neighbor_table(edges, n)
    positions = np.empty((m, 2 * n - 2, 2))
    positions[:, :n] = terminals
    positions[:, n:] = _initial_positions(edges, terminals)
    lengths = _edge_lengths(positions, edges).sum(axis=1)
    status = np.full(m, _ACTIVE, dtype=np.int8)
    iterations = np.zeros(m, dtype=np.int64)
    window_drop = np.zeros(m)
    last_drop = np.zeros(m)
    earlier_drop = np.zeros(m)
    merge_tol = 100.0 * ctol
    if history is not None:
        history.append(float(lengths[0]))

    for it in range(1, opts.max_iterations + 1):
        idx = np.nonzero(status == _ACTIVE)[0]
        if not idx.size:
            break
        pos, edg, nbr = positions[idx], edges[idx], nb[idx]
        _sweep(pos, nbr, n)
        el = _edge_lengths(pos, edg)
        if _merge_collapsed(pos, edg, nbr, n, el, merge_tol):
            el = _edge_lengths(pos, edg)
        new = el.sum(axis=1)
        positions[idx] = pos
        change = (lengths[idx] - new) / new
        window_drop[idx] += lengths[idx] - new
        lengths[idx] = new
        iterations[idx] = it
        if history is not None:
            history.append(float(new[0]))
        status[idx[change < opts.convergence_tol]] = _CONVERGED

        if opts.prune_with_mst and it % _LB_INTERVAL == 0:
            still = idx[status[idx] == _ACTIVE]
            if still.size:
                best = min(incumbent, float(lengths.min())) * (1.0 + _PRUNE_SLACK)
                bound = _lower_bounds(positions[still], edges[still], n, ctol)
                projected = _projected_lengths(lengths[still], window_drop[still], last_drop[still],
                                               earlier_drop[still])
                if it < _TAIL_MIN_SWEEPS:
                    projected[:] = -np.inf
                status[still[(bound > best) | (projected > best)]] = _PRUNED
            earlier_drop[idx] = last_drop[idx]
            last_drop[idx] = window_drop[idx]
            window_drop[idx] = 0.0

    status[status == _ACTIVE] = _EXHAUSTED
    return positions, lengths, status, iterations


def _projected_lengths(lengths: np.ndarray, drop: np.ndarray, previous: np.ndarray,
                       earlier: np.ndarray) -> np.ndarray:
    """
    Длина за вычетом _TAIL_FACTOR геометрических остатков убывания drop·r/(1 − r),
    r — большее из отношений убываний двух последних пар окон; при r ≥ 1 или без истории
    возвращается −∞ (строка не отбрасывается).
    """
    usable = (earlier > 0.0) & (previous > 0.0) & (drop > 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.maximum(drop / previous, previous / earlier)
        tail = drop * ratio / (1.0 - ratio)
    usable &= ratio < 1.0
    return np.where(usable, lengths - _TAIL_FACTOR * tail, -np.inf)


def _polish(steiner: np.ndarray, edges: np.ndarray, terminals: np.ndarray, ctol: float,
            max_steps: int = 50) -> tuple[np.ndarray, float]:
    """
    Доводка невырожденной реализации методом Ньютона с дроблением шага.
    Длина не возрастает; при ребрах короче 10·ctol реализация возвращается без изменений.
    """
    n, k = len(terminals), len(steiner)
    a, b = edges[:, 0], edges[:, 1]

    def total(x: np.ndarray) -> float:
        full = np.vstack([terminals, x])
        d = full[a] - full[b]
        return float(np.hypot(d[:, 0], d[:, 1]).sum())

    x = steiner.copy()
    current = total(x)
    for _ in range(max_steps):
        full = np.vstack([terminals, x])
        diff = full[a] - full[b]
        lengths = np.hypot(diff[:, 0], diff[:, 1])
        if lengths.min() < 10.0 * ctol:
            break
        unit = diff / lengths[:, None]
        grad = np.zeros((n + k, 2))
        np.add.at(grad, a, unit)
        np.add.at(grad, b, -unit)
        hess = np.zeros((n + k, 2, n + k, 2))
        for (i, j), u, ln in zip(edges, unit, lengths):
            block = (np.eye(2) - np.outer(u, u)) / ln
            hess[i, :, i, :] += block
            hess[j, :, j, :] += block
            hess[i, :, j, :] -= block
            hess[j, :, i, :] -= block
        try:
            step = np.linalg.solve(hess[n:, :, n:, :].reshape(2 * k, 2 * k), -grad[n:].reshape(2 * k))
        except np.linalg.LinAlgError:
            break
        step = step.reshape(k, 2)
        t = 1.0
        while t > 1e-8:
            trial = x + t * step
            value = total(trial)
            if value <= current:
                break
            t *= 0.5
        else:
            break
        moved = t * float(np.abs(step).max())
        x, current = trial, value
        if moved < 1e-15:
            break
    return x, current


def _min_angle(full: np.ndarray, edges, ctol: float) -> float:
    """Наименьший угол между ребрами в реализованных вершинах (совпавшие узлы склеиваются)."""
    parent = list(range(len(full)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    real = []
    for i, j in edges:
        if np.hypot(*(full[i] - full[j])) < ctol:
            parent[find(i)] = find(j)
        else:
            real.append((i, j))
    incident: dict[int, list[np.ndarray]] = {}
    for i, j in real:
        incident.setdefault(find(i), []).append(full[j] - full[i])
        incident.setdefault(find(j), []).append(full[i] - full[j])
    best = math.pi
    for vectors in incident.values():
        for p in range(len(vectors)):
            for q in range(p + 1, len(vectors)):
                u, v = vectors[p], vectors[q]
                best = min(best, math.atan2(abs(u[0] * v[1] - u[1] * v[0]), float(u @ v)))
    return best


def _build_solution(topology: Topology, points: list[Point], steiner_norm: np.ndarray, centre: np.ndarray,
                    scale: float, terminals_norm: np.ndarray, converged: bool, ctol: float,
                    ties: tuple[int, ...] = (), iterations: int = 0,
                    history: tuple[float, ...] = ()) -> SteinerSolution:
    steiner = [Point(*(centre + scale * x)) for x in steiner_norm]
    full_norm = np.vstack([terminals_norm, steiner_norm])
    real = [p.as_tuple() for p in points] + [p.as_tuple() for p in steiner]
    length = sum(math.dist(real[i], real[j]) for i, j in topology.edges)
    collapsed = tuple((i, j) for i, j in topology.edges if np.hypot(*(full_norm[i] - full_norm[j])) < ctol)
    return SteinerSolution(
        topology=topology,
        terminals=tuple(points),
        steiner_points=tuple(steiner),
        length=length,
        converged=converged,
        collapsed_pairs=collapsed,
        min_angle=_min_angle(full_norm, topology.edges, ctol),
        ties=ties,
        iterations=iterations,
        history=history,
    )


# ---------------------------------------------------------------------------
# Операции
# ---------------------------------------------------------------------------

def mst_length(terminals) -> float:
    """Длина евклидова минимального остовного дерева."""
    points = _as_points(terminals)
    if len(points) < 2:
        raise InvalidInputError("Для остовного дерева нужно не меньше двух точек", "n", len(points))
    graph = nx.Graph()
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            graph.add_edge(i, j, weight=points[i].distance_to(points[j]))
    tree = nx.minimum_spanning_tree(graph)
    return float(sum(w for _, _, w in tree.edges(data="weight")))


def melzak3(a: Point, b: Point, c: Point) -> SteinerSolution:
    """
    Дерево Штейнера для трех точек построением Мелзака: E — вершина правильного треугольника
    на BC по другую сторону от A; точка Штейнера — вторая точка пересечения прямой AE
    с окружностью, описанной около BCE. В вырожденном случае (угол ≥ 2π/3) — путь из двух отрезков.
    """
    pts = (a, b, c)
    fermat = fermat_point(a, b, c)
    topology = Topology(n=3, edges=((0, 3), (1, 3), (2, 3)), canonical_id=0)
    if fermat.degenerate:
        steiner = fermat.point
    else:
        mx, my = 0.5 * (b.x + c.x), 0.5 * (b.y + c.y)
        h = math.sqrt(3.0) / 2.0
        px, py = -(c.y - b.y) * h, (c.x - b.x) * h
        side_a = (c.x - b.x) * (a.y - b.y) - (c.y - b.y) * (a.x - b.x)
        side_e = (c.x - b.x) * py - (c.y - b.y) * px
        if side_a * side_e > 0:
            px, py = -px, -py
        e = Point(mx + px, my + py)
        ae = a.distance_to(e)
        ox, oy = (b.x + c.x + e.x) / 3.0, (b.y + c.y + e.y) / 3.0
        radius_sq = (b.distance_to(c) ** 2) / 3.0
        t1 = ((a.x - ox) ** 2 + (a.y - oy) ** 2 - radius_sq) / ae
        steiner = Point(a.x + t1 * (e.x - a.x) / ae, a.y + t1 * (e.y - a.y) / ae)

    full = np.array([p.as_tuple() for p in pts] + [steiner.as_tuple()])
    scale = max(a.distance_to(b), b.distance_to(c), c.distance_to(a))
    ctol = COLLAPSE_TOL * scale
    collapsed = tuple((i, 3) for i in range(3) if pts[i].distance_to(steiner) < ctol)
    return SteinerSolution(
        topology=topology,
        terminals=pts,
        steiner_points=(steiner,),
        length=sum(p.distance_to(steiner) for p in pts),
        converged=True,
        collapsed_pairs=collapsed,
        min_angle=_min_angle(full, topology.edges, ctol),
    )


def optimize_topology(t: Topology, terminals, opts: SolveOptions | None = None) -> SteinerSolution:
    """
    Минимизация длины при фиксированной топологии: каждая точка Штейнера заменяется точкой Ферма
    своих соседей, пока относительное изменение длины не станет меньше convergence_tol.
    """
    opts = opts or SolveOptions()
    points = _as_points(terminals)
    if len(points) != t.n:
        raise InvalidInputError("Число терминалов не совпадает с топологией", "n", len(points))
    normed, centre, scale, ctol = _normalise(points)
    edges = np.array([t.edges])
    history: list[float] | None = [] if opts.record_history else None
    positions, lengths, status, iterations = _relax(edges, normed, opts, math.inf, ctol, history)
    steiner = positions[0, t.n:]
    converged = bool(status[0] == _CONVERGED)
    if converged:
        steiner, _ = _polish(steiner, np.array(t.edges), normed, ctol)
    else:
        logger.warning(f"Топология {t.canonical_id} не сошлась за {opts.max_iterations} итераций")
    return _build_solution(t, points, steiner, centre, scale, normed, converged, ctol,
                           iterations=int(iterations[0]),
                           history=tuple(v * scale for v in history) if history is not None else ())


def _solve_chunk(task) -> dict:
    start, edges, terminals, opts, incumbent, ctol = task
    positions, lengths, status, iterations = _relax(edges, terminals, opts, incumbent, ctol)
    n = len(terminals)
    usable = np.nonzero(status != _PRUNED)[0]
    result = {
        "start": start,
        "converged": int((status == _CONVERGED).sum()),
        "pruned": int((status == _PRUNED).sum()),
        "exhausted": int((status == _EXHAUSTED).sum()),
        "ids": np.empty(0, dtype=np.int64),
    }
    if usable.size:
        window = lengths[usable].min() * (1.0 + _POLISH_WINDOW)
        rows = usable[lengths[usable] <= window]
        rows = rows[np.lexsort((rows, lengths[rows]))][:_CANDIDATES_PER_CHUNK]
        result.update(ids=start + rows, lengths=lengths[rows], steiner=positions[rows, n:],
                      status=status[rows], iterations=iterations[rows])
    logger.debug(f"Пачка {start}: сошлось {result['converged']}, отброшено {result['pruned']}, "
                 f"без сходимости {result['exhausted']}")
    return result


def solve_steiner(terminals, opts: SolveOptions | None = None) -> SteinerSolution:
    """
    Минимум по всем полным топологиям. При prune_with_mst топологии, чья нижняя оценка
    превысила рекорд (длина MST, opts.upper_bound или лучшая найденная длина), отбрасываются.
    При последовательном счете рекорд переходит из пачки в пачку. Результат не зависит
    от parallelism: пачки фиксированного размера, равные длины разрешаются наименьшим canonical_id.

    :raises SolverFailureError: ни одна топология не сошлась.
    """
    opts = opts or SolveOptions()
    points = _as_points(terminals)
    n = len(points)
    if not MIN_TERMINALS <= n <= MAX_TERMINALS:
        raise InvalidInputError(f"Число терминалов должно лежать в [{MIN_TERMINALS}, {MAX_TERMINALS}]", "n", n)
    normed, centre, scale, ctol = _normalise(points)
    topologies = enumerate_full_topologies(n)
    incumbent = mst_length(points) / scale if opts.prune_with_mst else math.inf
    if opts.upper_bound is not None:
        incumbent = min(incumbent, opts.upper_bound / scale)
    size = opts.chunk_size
    tasks = [(start, topologies.edges[start:start + size], normed, opts, incumbent, ctol)
             for start in range(0, len(topologies), size)]
    jobs = opts.parallelism or os.cpu_count() or 1
    logger.info(f"Терминалов {n}, топологий {len(topologies)}, пачек {len(tasks)}, процессов {min(jobs, len(tasks))}")

    if jobs == 1 or len(tasks) == 1:
        results = []
        for start, edges, terminals_norm, chunk_opts, _, chunk_ctol in tasks:
            result = _solve_chunk((start, edges, terminals_norm, chunk_opts, incumbent, chunk_ctol))
            if result["ids"].size:
                incumbent = min(incumbent, float(result["lengths"].min()))
            results.append(result)
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            results = list(pool.map(_solve_chunk, tasks))

    if sum(r["converged"] for r in results) == 0:
        raise SolverFailureError(n, len(topologies), opts.max_iterations)
    pruned = sum(r["pruned"] for r in results)

    ids = np.concatenate([r["ids"] for r in results])
    lengths = np.concatenate([r["lengths"] for r in results if r["ids"].size])
    steiner = np.concatenate([r["steiner"] for r in results if r["ids"].size])
    status = np.concatenate([r["status"] for r in results if r["ids"].size])
    iterations = np.concatenate([r["iterations"] for r in results if r["ids"].size])

    window = lengths.min() * (1.0 + _POLISH_WINDOW)
    polished = []
    for i in np.nonzero(lengths <= window)[0]:
        x = steiner[i]
        value = float(lengths[i])
        if status[i] == _CONVERGED:
            x, value = _polish(x, topologies.edges[ids[i]].astype(np.intp), normed, ctol)
        polished.append((value, int(ids[i]), x, bool(status[i] == _CONVERGED), int(iterations[i])))
    polished.sort(key=lambda item: (item[0], item[1]))

    tied = [item for item in polished if item[0] <= polished[0][0] * (1.0 + opts.tie_tolerance)]
    ties = tuple(sorted(item[1] for item in tied))
    _, best_id, best_x, best_converged, best_iterations = min(tied, key=lambda item: item[1])
    solution = _build_solution(topologies[best_id], points, best_x, centre, scale, normed, best_converged, ctol,
                               ties=ties, iterations=best_iterations)
    logger.info(f"Минимум {solution.length:.12f}: топология {best_id}, равных {len(ties)}, отброшено {pruned}")
    return solution


def topology_count(n: int) -> int:
    """(2n − 5)!! — число полных топологий."""
    return math.prod(range(1, 2 * n - 4, 2))


__all__ = [
    "TopologySet", "enumerate_full_topologies", "optimize_topology", "solve_steiner", "mst_length", "melzak3",
    "topology_count",
]
