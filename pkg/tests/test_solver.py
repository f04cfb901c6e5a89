"""
Точный решатель: перебор топологий, оптимизация, известные ответы и сверка с независимым минимизатором.
"""
import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from pydantic import ValidationError
from scipy.optimize import minimize

from SteinerKit.common.exceptions import InvalidInputError, SolverFailureError
from SteinerKit.geometry import TWO_PI_3, fermat_point
from SteinerKit.solver import (enumerate_full_topologies, melzak3, mst_length, optimize_topology, solve_steiner,
                               topology_count)
from SteinerKit.types import Point, SolveOptions

SQRT3 = math.sqrt(3.0)
SQUARE = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]


def _random_points(rng, n, min_separation=0.05):
    while True:
        pts = rng.uniform(0.0, 1.0, size=(n, 2))
        dist = np.linalg.norm(pts[:, None] - pts[None, :], axis=-1)
        np.fill_diagonal(dist, np.inf)
        if dist.min() >= min_separation:
            return [tuple(p) for p in pts.tolist()]


def _splits(topology):
    """Набор разбиений терминалов, задаваемых ребрами: не зависит от нумерации точек Штейнера."""
    graph = nx.Graph(topology.edges)
    result = set()
    for a, b in topology.edges:
        graph.remove_edge(a, b)
        side = nx.node_connected_component(graph, 0)
        result.add(frozenset(k for k in range(topology.n) if k not in side))
        graph.add_edge(a, b)
    return frozenset(result)


# ---------------------------------------------------------------------------
# Топологии
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n, count", [(3, 1), (4, 3), (5, 15), (6, 105), (7, 945)])
def test_topology_counts(n, count):
    assert topology_count(n) == count
    assert len(enumerate_full_topologies(n)) == count


def test_nine_terminals_count():
    assert topology_count(9) == 135135
    assert len(enumerate_full_topologies(9)) == 135135


@pytest.mark.parametrize("n", [4, 5, 6])
def test_topologies_are_distinct_full_trees(n):
    topologies = enumerate_full_topologies(n)
    seen = set()
    for t in topologies:
        graph = nx.Graph(t.edges)
        assert nx.is_tree(graph)
        assert len(t.edges) == 2 * n - 3
        assert all(t.degree(k) == 1 for k in range(n))
        assert all(t.degree(s) == 3 for s in t.steiner_ids)
        seen.add(_splits(t))
    assert len(seen) == len(topologies)


def test_topology_set_indexing():
    ts = enumerate_full_topologies(3)
    assert ts[0].edges == ((0, 3), (1, 3), (2, 3))
    ts5 = enumerate_full_topologies(5)
    assert ts5[-1].canonical_id == 14
    assert [t.canonical_id for t in ts5[2:5]] == [2, 3, 4]


@pytest.mark.parametrize("n", [2, 11])
def test_topology_bad_n(n):
    with pytest.raises(InvalidInputError):
        enumerate_full_topologies(n)


# ---------------------------------------------------------------------------
# Известные ответы
# ---------------------------------------------------------------------------

def test_unit_square():
    sol = solve_steiner(SQUARE)
    assert sol.length == pytest.approx(1 + SQRT3, abs=1e-12)
    assert sol.converged
    # две топологии (пары соседних вершин) дают одинаковую длину, диагональная — нет
    assert sol.ties == (0, 2)
    assert sol.topology.canonical_id == 0
    assert sol.min_angle == pytest.approx(TWO_PI_3, abs=1e-6)


def test_unit_square_tie_gap():
    topologies = enumerate_full_topologies(4)
    first = optimize_topology(topologies[0], SQUARE)
    second = optimize_topology(topologies[2], SQUARE)
    assert abs(first.length - second.length) < 1e-12
    crossed = optimize_topology(topologies[1], SQUARE)
    assert crossed.length == pytest.approx(2 * math.sqrt(2), abs=1e-9)
    assert crossed.collapsed_pairs


def test_equilateral_triangle():
    sol = solve_steiner([(0, 0), (1, 0), (0.5, SQRT3 / 2)])
    assert sol.length == pytest.approx(SQRT3, abs=1e-12)
    s = sol.steiner_points[0]
    assert math.dist(s.as_tuple(), (0.5, SQRT3 / 6)) < 1e-9


def test_collinear_terminals():
    sol = solve_steiner([(0, 0), (1, 0), (2, 0)])
    assert sol.length == pytest.approx(2.0, abs=1e-12)
    assert math.dist(sol.steiner_points[0].as_tuple(), (1.0, 0.0)) < 1e-12
    assert (1, 3) in sol.collapsed_pairs


def test_first_branching_tripod():
    lam = 0.01
    sol = solve_steiner([(0, 0), (1 + lam / 2, SQRT3 * lam / 2), (1 + lam / 2, -SQRT3 * lam / 2)])
    assert sol.length == pytest.approx(1 + 2 * lam, abs=1e-12)
    assert math.dist(sol.steiner_points[0].as_tuple(), (1.0, 0.0)) < 1e-9


def test_invalid_inputs():
    with pytest.raises(InvalidInputError):
        solve_steiner([(0, 0), (0, 0), (1, 1)])
    with pytest.raises(InvalidInputError):
        solve_steiner([(0, 0), (1, 1)])
    with pytest.raises(InvalidInputError):
        solve_steiner([(float(i), 0.0) for i in range(11)])


def test_solver_failure_when_iterations_exhausted():
    with pytest.raises(SolverFailureError):
        solve_steiner(SQUARE, SolveOptions(max_iterations=1))
    sol = optimize_topology(enumerate_full_topologies(4)[0], SQUARE, SolveOptions(max_iterations=1))
    assert not sol.converged


def test_optimize_topology_checks_size():
    with pytest.raises(InvalidInputError):
        optimize_topology(enumerate_full_topologies(4)[0], SQUARE[:3])


# ---------------------------------------------------------------------------
# MST и Мелзак
# ---------------------------------------------------------------------------

def test_mst_length():
    assert mst_length(SQUARE) == pytest.approx(3.0)
    assert mst_length([(0, 0), (3, 4)]) == pytest.approx(5.0)
    assert mst_length([(0, 0), (1, 0), (0.5, SQRT3 / 2)]) == pytest.approx(2.0)
    with pytest.raises(InvalidInputError):
        mst_length([(0, 0)])


def test_melzak_known_values():
    assert melzak3(Point(0, 0), Point(1, 0), Point(0.5, SQRT3 / 2)).length == pytest.approx(SQRT3, abs=1e-12)
    lam = 1 / 300
    y2, b2 = Point(0, 0), Point(0.25 + lam / 2, SQRT3 * lam / 2)
    sol = melzak3(y2, b2, Point(b2.x, -b2.y))
    assert sol.length == pytest.approx(0.25 + 2 * lam, abs=1e-12)


def test_melzak_obtuse():
    a, b, c = Point(0, 0), Point(1, 0), Point(1.5, 0.05)
    sol = melzak3(a, b, c)
    assert sol.steiner_points[0] == b
    assert sol.length == pytest.approx(1 + math.hypot(0.5, 0.05), abs=1e-15)
    assert (1, 3) in sol.collapsed_pairs


coords = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False)


@settings(max_examples=100, deadline=None)
@given(coords, coords, coords, coords, coords, coords)
def test_melzak_agrees_with_fermat(ax, ay, bx, by, cx, cy):
    a, b, c = Point(ax, ay), Point(bx, by), Point(cx, cy)
    if min(a.distance_to(b), b.distance_to(c), c.distance_to(a)) < 0.1:
        return
    expected = fermat_point(a, b, c)
    got = melzak3(a, b, c)
    assert got.length == pytest.approx(expected.tripod_length, abs=1e-9)


def test_three_terminal_solver_matches_melzak():
    rng = np.random.default_rng(1)
    for _ in range(200):
        pts = _random_points(rng, 3)
        oracle = melzak3(*(Point(*p) for p in pts)).length
        assert solve_steiner(pts).length == pytest.approx(oracle, abs=1e-10)


# ---------------------------------------------------------------------------
# Сверка с независимым минимизатором (4 терминала)
# ---------------------------------------------------------------------------

_NM_OPTIONS = {"xatol": 1e-12, "fatol": 1e-14, "maxiter": 20_000, "maxfev": 40_000}


def _nelder_mead_oracle(pts, rng):
    p = np.asarray(pts)
    best = math.inf
    for (a, b), (c, d) in (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))):
        def length(x, a=a, b=b, c=c, d=d):
            s1, s2 = x[:2], x[2:]
            return (np.linalg.norm(s1 - p[a]) + np.linalg.norm(s1 - p[b])
                    + np.linalg.norm(s2 - p[c]) + np.linalg.norm(s2 - p[d]) + np.linalg.norm(s1 - s2))

        starts = [np.concatenate([(p[a] + p[b]) / 2, (p[c] + p[d]) / 2]),
                  np.tile(p.mean(axis=0), 2),
                  rng.uniform(0.0, 1.0, size=4)]
        for x0 in starts:
            res = minimize(length, x0, method="Nelder-Mead", options=_NM_OPTIONS)
            res = minimize(length, res.x, method="Nelder-Mead", options=_NM_OPTIONS)
            best = min(best, float(res.fun))
    return best


def test_four_terminals_against_nelder_mead():
    rng = np.random.default_rng(2024)
    for _ in range(50):
        pts = _random_points(rng, 4)
        sol = solve_steiner(pts)
        assert sol.length == pytest.approx(_nelder_mead_oracle(pts, rng), abs=1e-6)
        assert sol.length <= mst_length(pts) + 1e-12
        assert sol.length >= SQRT3 / 2 * mst_length(pts) - 1e-12
        if not sol.collapsed_pairs:
            assert sol.min_angle >= TWO_PI_3 - 1e-6


# ---------------------------------------------------------------------------
# Свойства решателя
# ---------------------------------------------------------------------------

def test_result_independent_of_parallelism():
    pts = _random_points(np.random.default_rng(5), 6)
    serial = solve_steiner(pts, SolveOptions(parallelism=1, chunk_size=16))
    parallel = solve_steiner(pts, SolveOptions(parallelism=2, chunk_size=16))
    assert parallel.length == serial.length
    assert parallel.topology.canonical_id == serial.topology.canonical_id
    assert parallel.ties == serial.ties


def test_pruning_does_not_change_optimum():
    pts = _random_points(np.random.default_rng(11), 6)
    pruned = solve_steiner(pts)
    full = solve_steiner(pts, SolveOptions(prune_with_mst=False))
    assert pruned.length == pytest.approx(full.length, abs=1e-12)


@pytest.mark.parametrize("parallelism", [1, 2])
def test_upper_bound_does_not_change_optimum(parallelism):
    pts = _random_points(np.random.default_rng(11), 6)
    plain = solve_steiner(pts)
    bounded = solve_steiner(pts, SolveOptions(upper_bound=plain.length * (1 + 1e-12),
                                              parallelism=parallelism, chunk_size=16))
    assert bounded.length == pytest.approx(plain.length, abs=1e-12)
    assert bounded.topology.canonical_id == plain.topology.canonical_id


def test_square_with_tight_upper_bound():
    sol = solve_steiner(SQUARE, SolveOptions(upper_bound=(1 + SQRT3) * (1 + 1e-12)))
    assert sol.length == pytest.approx(1 + SQRT3, abs=1e-12)
    assert sol.ties == (0, 2)


def test_upper_bound_must_be_positive():
    with pytest.raises(ValidationError):
        SolveOptions(upper_bound=0.0)


def test_length_history_is_monotone():
    pts = _random_points(np.random.default_rng(3), 5)
    topology = enumerate_full_topologies(5)[7]
    sol = optimize_topology(topology, pts, SolveOptions(record_history=True))
    history = np.array(sol.history)
    assert len(history) == sol.iterations + 1
    assert np.all(np.diff(history) <= 1e-12)
    assert history[-1] >= sol.length - 1e-12


def test_solution_degrees_and_upper_bound():
    pts = _random_points(np.random.default_rng(8), 7)
    sol = solve_steiner(pts)
    assert all(sol.topology.degree(s) == 3 for s in sol.topology.steiner_ids)
    assert sol.length <= mst_length(pts) + 1e-12
    assert len(sol.steiner_points) == 5
    payload = sol.to_dict()
    assert payload["topology_id"] == sol.topology.canonical_id
    assert len(payload["edges"]) == 11


@pytest.mark.parametrize("pts", [
    _random_points(np.random.default_rng(8), 7),
    SQUARE,
    [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)],
    [(0.0, 0.0), (2.0, 0.0), (1.0, 0.1)],
    [(0.0, 0.0), (1.0, 0.0), (0.5, SQRT3 / 2)],
    [(0.0, 0.0), (1.005, SQRT3 * 0.005), (1.005, -SQRT3 * 0.005)],
], ids=["random7", "square", "collinear", "obtuse", "equilateral", "tripod"])
def test_realized_degree_at_most_three(pts):
    sol = solve_steiner(pts)
    degrees = sol.realized_degrees()
    assert max(degrees.values()) <= 3
    assert sum(degrees.values()) == 2 * (len(sol.topology.edges) - len(sol.collapsed_pairs))


def test_square_with_centre_terminal():
    # центр лежит на среднем ребре дерева квадрата и становится вершиной степени 2
    sol = solve_steiner([*SQUARE, (0.5, 0.5)])
    assert sol.length == pytest.approx(1 + SQRT3, abs=1e-9)
    degrees = sol.realized_degrees()
    assert max(degrees.values()) <= 3
    # точки Штейнера имеют номера ≥ 5, так что склеенная с центром вершина хранится под номером 4
    assert degrees[4] == 2


def test_crossed_topology_realizes_degree_four():
    crossed = optimize_topology(enumerate_full_topologies(4)[1], SQUARE)
    assert max(crossed.realized_degrees().values()) == 4


def test_collinear_realized_degrees():
    sol = solve_steiner([(0, 0), (1, 0), (2, 0)])
    assert sol.realized_degrees() == {0: 1, 1: 2, 2: 1}
