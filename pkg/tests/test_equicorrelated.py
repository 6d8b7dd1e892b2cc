import json
import math

import pytest
from hypothesis import example, given, settings, strategies as st

from conftest import exact_fwer
from fwerbound import BoundResult, Equicorrelation, TestProblem, best_bound
from fwerbound.equicorrelated import (
    BOUNDS,
    TRIVIAL,
    all_bounds,
    baseline_alpha_one_minus_rho,
    bound_cor31,
    bound_cor32,
    bound_thm31,
    bound_thm33,
    bound_thm34,
    bound_thm35,
    bound_thm36,
    select_best,
)
from fwerbound.errors import DomainError
from fwerbound.special import monhor_integral

PI = math.pi

problems = st.builds(
    TestProblem,
    st.integers(2, 2000),
    st.floats(0.001, 0.5),
)


def test_problem_cutoff():
    assert TestProblem(10, 0.3).x == pytest.approx(1.8808, abs=1e-4)
    assert TestProblem(100, 0.05).x == pytest.approx(3.2905, abs=1e-4)
    assert TestProblem(10, 0.3).level == pytest.approx(0.03)


@pytest.mark.parametrize("n,alpha", [(1, 0.05), (10, 0.0), (10, 1.0), (10, 1.5), (2.5, 0.05), (True, 0.1)])
def test_problem_validation(n, alpha):
    with pytest.raises(DomainError):
        TestProblem(n, alpha)


def test_equicorrelation_validation():
    assert Equicorrelation(1.0).rho == 1.0
    for bad in (-0.01, 1.01, float("nan")):
        with pytest.raises(DomainError):
            Equicorrelation(bad)


def test_thm31_examples():
    assert bound_thm31(TestProblem(10, 0.3), 0.0).value == pytest.approx(0.2919, abs=1e-12)
    v = bound_thm31(TestProblem(10, 0.3), 0.1)
    expected = 0.3 - 0.9 * 0.009 - 9 / (2 * PI) * monhor_integral(TestProblem(10, 0.3).x, 0.1).value
    assert v.value == pytest.approx(expected, rel=1e-14)
    assert v.value >= 0.2132
    assert bound_thm31(TestProblem(100, 0.05), 0.3).value >= 0.0355
    with pytest.raises(DomainError):
        bound_thm31(TestProblem(10, 0.3), 1.0)


def test_cor31_examples():
    assert bound_cor31(TestProblem(10, 0.3), 0.03).value == pytest.approx(0.2919, abs=1e-12)
    assert bound_cor31(TestProblem(10, 0.3), 0.0).value == pytest.approx(0.3)
    res = bound_cor31(TestProblem(100, 0.05), 0.1)
    assert not res.applicable and res.value == 0.05


def test_cor32_examples():
    p = TestProblem(100, 0.05)
    assert bound_cor32(p, 0.3).value == pytest.approx(0.0496, abs=5e-5)
    assert bound_cor32(p, 0.0).value == pytest.approx(bound_thm31(p, 0.0).value, abs=1e-15)
    assert not bound_cor32(TestProblem(10, 0.3), 0.5).applicable


def test_thm33_examples():
    p = TestProblem(100, 0.05)
    res = bound_thm33(p, 0.6)
    # x = 3.2905 lies in [3.06, 3.33), where the constant is 1/pi
    assert res.extra["table_constant"] == pytest.approx(1 / PI)
    assert res.value == pytest.approx(0.05 - 0.99 * 0.0025 / 100 - 0.99 * 0.05 * 0.6 / (6 * PI), rel=1e-14)
    assert not bound_thm33(p, 0.4).applicable
    assert not bound_thm33(TestProblem(10, 0.3), 0.6).applicable
    # x = 4.3 is beyond the table
    assert not bound_thm33(TestProblem(2, 2 * 8.5e-6), 0.6).applicable


def test_thm34_examples():
    p = TestProblem(100, 0.05)
    res = bound_thm34(p, 0.2)
    assert res.applicable and res.extra["table_id"] == "D2"
    # x = 3.2905 lies in [3.23, 3.66) of the second table
    assert res.extra["table_constant"] == pytest.approx(1 / PI**3)
    assert not bound_thm34(p, 0.005).applicable
    assert not bound_thm34(p, 0.5).applicable


def test_thm35_examples():
    p = TestProblem(10, 0.3)
    assert bound_thm35(p, 0.5).value == pytest.approx(0.2694, abs=1e-12)
    assert bound_thm35(p, 0.9).value == pytest.approx(0.2514, abs=1e-12)
    assert not bound_thm35(p, 0.4).applicable


def test_thm36_examples():
    p = TestProblem(10, 0.3)
    assert bound_thm36(p, 0.1).value == pytest.approx(0.3 - 0.0081 - 0.9 * 0.3 * 0.1 * 2 / (5 * PI), abs=1e-12)
    assert bound_thm36(p, 0.1).value == pytest.approx(0.2885, abs=1e-4)
    assert bound_thm36(p, 0.0).value == pytest.approx(0.2919, abs=1e-12)
    assert not bound_thm36(TestProblem(100, 0.05), 0.3).applicable


def test_best_bound_examples():
    p = TestProblem(10, 0.3)
    best = best_bound(p, 0.5)
    assert best.value <= min(bound_thm35(p, 0.5).value, bound_thm36(p, 0.5).value, bound_thm31(p, 0.5).value)
    best = best_bound(TestProblem(500, 0.05), 0.7)
    assert 0.0081 <= best.value <= 0.05
    small = TestProblem(100, 0.05)
    assert best_bound(small, 0.0001).value <= bound_cor31(small, 0.0001).value


def test_best_bound_at_rho_one():
    res = best_bound(TestProblem(100, 0.05), 1.0)
    assert res.method == "Cor3.2"
    assert "Thm3.1" not in [r.method for r in all_bounds(TestProblem(100, 0.05), 1.0)]


def test_select_best_tie_keeps_first():
    p = TestProblem(10, 0.3)
    a, b = bound_trivial_like(p, "A"), bound_trivial_like(p, "B")
    assert select_best([a, b]).method == "A"


def bound_trivial_like(p, name):
    res = BOUNDS[TRIVIAL](p)
    return BoundResult(**{**res.__dict__, "method": name})


def test_result_serialization():
    res = bound_thm33(TestProblem(100, 0.05), 0.6)
    data = json.loads(res.to_json())
    for key in ("n", "alpha", "x", "rho", "method", "value", "applicable", "conditions", "terms"):
        assert key in data
    assert data["terms"]["alpha_term"] - data["terms"]["quadratic_term"] - data["terms"]["correlation_term"] \
        == pytest.approx(data["value"], abs=1e-16)


def test_baseline():
    assert baseline_alpha_one_minus_rho(TestProblem(10, 0.3), 0.0) == 0.3
    assert baseline_alpha_one_minus_rho(TestProblem(10, 0.3), 1.0) == 0.0


@settings(max_examples=150, deadline=None)
@given(problems, st.floats(0.0, 1.0))
@example(TestProblem(246, 0.17632034708933444), 0.9999999999999999)
def test_every_applicable_bound_dominates_exact_fwer(problem, rho):
    exact = exact_fwer(problem.n, problem.alpha, rho)
    for res in all_bounds(problem, rho):
        if res.applicable:
            assert res.value >= exact - 1e-9, res.method


@settings(max_examples=100, deadline=None)
@given(problems, st.floats(0.0, 1.0))
def test_bounds_never_exceed_alpha(problem, rho):
    for res in all_bounds(problem, rho):
        assert res.value <= problem.alpha + 1e-15


@settings(max_examples=100, deadline=None)
@given(problems, st.floats(0.0, 0.98), st.floats(0.001, 0.02))
def test_thm31_decreasing_in_rho(problem, rho, step):
    assert bound_thm31(problem, rho + step).value <= bound_thm31(problem, rho).value


@settings(max_examples=150, deadline=None)
@given(problems, st.floats(0.0, 0.999))
def test_weakening_chain(problem, rho):
    # the integral form is sharpest; each closed form gives some of it up
    thm31 = bound_thm31(problem, rho).value
    cor32 = bound_cor32(problem, rho)
    if cor32.applicable:
        assert thm31 <= cor32.value + 1e-15
        thm33 = bound_thm33(problem, rho)
        # the last C level is only valid up to x = 4.221
        if thm33.applicable and problem.x <= 4.22:
            assert cor32.value <= thm33.value + 1e-15
        thm34 = bound_thm34(problem, rho)
        if thm34.applicable:
            assert cor32.value <= thm34.value + 1e-15
    for res in (bound_thm35(problem, rho), bound_thm36(problem, rho)):
        if res.applicable:
            assert thm31 <= res.value + 1e-15


def test_c_table_defect_breaks_chain_past_certified_range():
    # n = 2, alpha chosen so x = 4.229: inside the stated range, past the certified one
    alpha = 2 * (1 - 0.5 * math.erfc(-4.229 / math.sqrt(2)))
    p = TestProblem(2, alpha)
    # rho = 0.5 is where the certified threshold is tight
    assert bound_thm33(p, 0.5).applicable
    assert bound_thm33(p, 0.5).value < bound_cor32(p, 0.5).value
