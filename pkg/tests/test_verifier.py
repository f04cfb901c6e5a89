"""
Проверки лемм 0–2, теоремы на усечениях и оценка размерности.
"""
import math
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from SteinerKit.common.exceptions import InvalidInputError
from SteinerKit.fractal import epsilon_of, hausdorff_dimension_formula, terminal_set
from SteinerKit.geometry import distance_sum_to_sides, reflect
from SteinerKit.types import LambdaSequence, SolveOptions
from SteinerKit.verifier import (build_lemma1, check_lemma0, check_lemma1_decomposition, check_lemma2_shift,
                                 check_theorem, estimate_dimension, find_optimal_contact, lemma0_threshold,
                                 run_verification)

SQRT3 = math.sqrt(3.0)
GAP = SQRT3 - 1.5


# ---------------------------------------------------------------------------
# Лемма 0
# ---------------------------------------------------------------------------

def test_lemma0_just_below_bound():
    lam = 0.999 / 300
    bounds = check_lemma0(lam)
    expected = GAP * lam - 50 * epsilon_of(lam)
    assert bounds.item_i.relaxed_margin == pytest.approx(expected, rel=1e-9)
    assert bounds.item_i.relaxed_margin == pytest.approx(2.16e-4, rel=0.1)
    assert bounds.item_ii.relaxed_margin == pytest.approx(expected, rel=1e-9)
    assert bounds.surgery_passed
    assert bounds.sampled_bounds_passed
    assert bounds.max_abs_delta <= bounds.delta_bound
    assert bounds.passed


@pytest.mark.parametrize("lam", [1 / 3000, 1 / 1000, 1 / 500, 1 / 301])
def test_lemma0_margins_positive(lam):
    bounds = check_lemma0(lam)
    assert bounds.item_i.relaxed_margin > 0
    assert bounds.item_ii.relaxed_margin > 0
    assert bounds.passed


def test_lemma0_fails_for_large_lambda():
    bounds = check_lemma0(0.02)
    assert not bounds.passed
    assert bounds.item_i.relaxed_margin < 0
    # неравенство перестройки от λ не зависит
    assert bounds.surgery_passed
    report = bounds.to_report().to_dict()
    assert report["name"] == "lemma0"
    assert report["pass"] is False


def test_lemma0_threshold():
    lam_star = lemma0_threshold()
    assert 1 / 300 < lam_star < 1 / 15
    assert lam_star == pytest.approx(GAP / (50 + GAP), abs=1e-12)
    assert check_lemma0(lam_star * 0.99).item_i.relaxed_margin > 0
    assert check_lemma0(lam_star * 1.01).item_i.relaxed_margin < 0


# ---------------------------------------------------------------------------
# Лемма 1
# ---------------------------------------------------------------------------

def test_lemma1_closed_forms():
    lam = 0.1
    c = build_lemma1(lam)
    assert c.z.x == pytest.approx(1 + 3 * lam / 8, abs=1e-12)
    assert c.z.y == pytest.approx(3 * SQRT3 * lam / 8, abs=1e-12)
    assert c.z_l.x == pytest.approx(1 + 3 * lam / 8 - SQRT3 * lam / 4, abs=1e-12)
    assert c.z_l.y == pytest.approx(3 * SQRT3 * lam / 8 + lam / 4, abs=1e-12)
    assert c.z_r.x == pytest.approx(1 + 3 * lam / 8 + SQRT3 * lam / 4, abs=1e-12)
    assert c.to_report().passed


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=1e-6, max_value=0.2499))
def test_lemma1_construction_invariants(lam):
    c = build_lemma1(lam)
    assert c.closed_form_error <= 1e-12
    assert c.y1.distance_to(c.f) == pytest.approx(1 + 1.5 * lam, abs=1e-12)
    side = c.d.distance_to(c.e)
    assert c.e.distance_to(c.f) == pytest.approx(side, abs=1e-12)
    assert c.f.distance_to(c.d) == pytest.approx(side, abs=1e-12)
    assert c.z_l.distance_to(c.z_r) == pytest.approx(lam, abs=1e-12)
    assert math.dist(((c.z_l.x + c.z_r.x) / 2, (c.z_l.y + c.z_r.y) / 2), c.z.as_tuple()) < 1e-12
    assert reflect(c.z_l, c.axis) == c.v_l
    # сумма расстояний до сторон DEF одинакова для Y_1 и T_1
    assert distance_sum_to_sides(c.t1, (c.d, c.e, c.f)) == pytest.approx(1 + 1.5 * lam, abs=1e-12)


@pytest.mark.parametrize("lam", [0.0, 0.25, -0.1])
def test_lemma1_domain(lam):
    with pytest.raises(InvalidInputError):
        build_lemma1(lam)


def test_lemma1_decomposition_single_sample():
    lam = 1 / 300
    report = check_lemma1_decomposition(lam, samples_per_ball=1)
    assert report.passed
    assert report.computed_values["full_length"] == pytest.approx(1 + 2 * lam, abs=1e-12)
    assert report.margins["decomposition"] >= 0
    assert report.margins["mirror"] >= 0


def test_lemma1_decomposition_two_samples():
    report = check_lemma1_decomposition(1 / 300, samples_per_ball=2)
    assert report.passed
    parts = report.computed_values
    assert parts["parts_sum"] == pytest.approx(parts["full_length"], abs=1e-8)


def test_lemma1_decomposition_three_samples():
    report = check_lemma1_decomposition(1 / 300, samples_per_ball=3)
    assert report.passed
    assert report.inputs["samples_per_ball"] == 3
    parts = report.computed_values
    assert parts["parts_sum"] == pytest.approx(parts["full_length"], abs=1e-8)
    assert report.margins["mirror"] >= 0


def test_lemma1_decomposition_bad_samples():
    with pytest.raises(InvalidInputError):
        check_lemma1_decomposition(1 / 300, samples_per_ball=4)


# ---------------------------------------------------------------------------
# Лемма 2
# ---------------------------------------------------------------------------

def test_lemma2_zero_shift():
    lam = 1 / 300
    s = check_lemma2_shift(lam, 0.0)
    assert s.h_s == pytest.approx(0.25 + 2 * lam, abs=1e-15)
    assert s.h_s1 == pytest.approx(s.h_s, abs=1e-15)
    assert s.h_s2 == pytest.approx(s.h_s, abs=1e-15)
    assert s.competitor_improves


@settings(max_examples=100)
@given(st.floats(min_value=-1.0, max_value=1.0).filter(lambda t: t != 0.0))
def test_lemma2_averaging(t):
    lam = 1 / 300
    s = check_lemma2_shift(lam, t * lam)
    assert s.averaging_error <= 1e-10
    assert s.competitor_improves
    assert s.to_report().passed


def test_lemma2_shift_domain():
    with pytest.raises(InvalidInputError):
        check_lemma2_shift(1 / 300, 2 / 300)


def test_optimal_contact_is_symmetric():
    report = find_optimal_contact(1 / 300)
    assert abs(report.computed_values["h_star"]) <= 1e-8
    assert report.passed


# ---------------------------------------------------------------------------
# Теорема
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("lam", [1 / 301, 1 / 400, 1 / 1000])
@pytest.mark.parametrize("depth", [2, 3])
def test_theorem_on_truncations(lam, depth):
    report = check_theorem(lam, depth)
    assert report.n_terminals == 1 + 2 ** (depth - 1)
    assert report.relative_gap < 1e-9
    assert report.vertex_deviation <= 1e-7
    assert report.passed
    assert report.per_step_lower_bounds[-1] == pytest.approx(report.truncation_length, rel=1e-12)


@pytest.mark.slow
def test_theorem_depth_four():
    started = time.perf_counter()
    report = check_theorem(1 / 301, 4, SolveOptions(parallelism=0))
    elapsed = time.perf_counter() - started
    assert report.n_terminals == 9
    assert report.passed
    assert elapsed < 300.0


@pytest.mark.parametrize("depth", [1, 5])
def test_theorem_depth_limits(depth):
    with pytest.raises(InvalidInputError):
        check_theorem(1 / 301, depth)


# ---------------------------------------------------------------------------
# Размерность
# ---------------------------------------------------------------------------

def test_dimension_of_terminals():
    lam = 0.1
    ts = terminal_set(LambdaSequence.constant(lam), 1e-12, includes_root=False)
    assert len(ts) == 4096
    estimate = estimate_dimension(ts.points, [lam ** j for j in range(1, 7)])
    assert estimate == pytest.approx(hausdorff_dimension_formula(lam), abs=0.05)


def test_dimension_improves_with_depth():
    lam = 0.1
    seq = LambdaSequence.constant(lam)
    scales = [lam ** j for j in range(1, 7)]
    coarse = terminal_set(seq, 2e-4, includes_root=False)
    fine = terminal_set(seq, 1e-12, includes_root=False)
    assert coarse.level == 3
    target = hausdorff_dimension_formula(lam)
    assert abs(estimate_dimension(fine.points, scales) - target) < \
        abs(estimate_dimension(coarse.points, scales) - target)


def test_dimension_of_point_and_segment():
    assert estimate_dimension([(0.3, 0.3)], [0.1, 0.01]) == pytest.approx(0.0, abs=1e-12)
    segment = np.column_stack([np.linspace(0.0, 1.0, 10_000, endpoint=False), np.full(10_000, 0.5)])
    assert estimate_dimension(segment, [1e-1, 1e-2, 1e-3]) == pytest.approx(1.0, abs=0.05)


@pytest.mark.parametrize("points, scales", [
    ([], [0.1, 0.01]),
    ([(0, 0)], [0.1]),
    ([(0, 0)], [0.1, 0.1]),
    ([(0, 0)], [0.1, -0.01]),
])
def test_dimension_bad_input(points, scales):
    with pytest.raises(InvalidInputError):
        estimate_dimension(points, scales)


# ---------------------------------------------------------------------------
# Пакет проверок
# ---------------------------------------------------------------------------

def test_run_verification_passes_below_bound():
    bundle = run_verification(1 / 301, samples_per_ball=1)
    assert bundle["pass"] is True
    assert bundle["failed"] == []
    names = [c["name"] for c in bundle["checks"]]
    assert names == ["lemma0", "lemma1_construction", "lemma1_decomposition", "lemma2_shift", "lemma2_contact"]
    assert all(c["pass"] for c in bundle["checks"])


def test_run_verification_reports_failure():
    bundle = run_verification(0.02, samples_per_ball=1)
    assert bundle["pass"] is False
    assert "lemma0" in bundle["failed"]


def test_run_verification_rejects_bad_lambda():
    with pytest.raises(InvalidInputError):
        run_verification(-1.0)
