import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracmvt.errors import NonFiniteError, PreconditionError
from fracmvt.ivp import (
    FAMILY_COEFFICIENTS,
    IvpProblem,
    eoc_study,
    mittag_leffler_exact,
    power_family_member,
    residual_check,
    solve_abm,
    uniqueness_experiment,
)
from fracmvt.nagumo import CounterexampleRhs
from fracmvt.operators import FracOrder
from tests import oracles

HALF = FracOrder(0.5)
LINEAR = IvpProblem(HALF, 1.0, 1.0, "-y")
COUNTEREXAMPLE = IvpProblem(HALF, 1.0, 0.0, CounterexampleRhs(0.5))


@settings(max_examples=20, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(-3.0, 3.0), st.floats(-2.0, 2.0), st.integers(1, 200))
def test_constant_rhs_is_exact(alpha, y0, k, n):
    problem = IvpProblem(FracOrder(alpha), 1.5, y0, repr(k) if k >= 0 else f"0 - {-k!r}")
    sol = solve_abm(problem, n)
    assert sol.y[0] == y0
    exact = y0 + k * sol.mesh.nodes**alpha / math.gamma(alpha + 1)
    np.testing.assert_allclose(sol.y, exact, rtol=0, atol=1e-12 * max(1.0, abs(y0), abs(k)))


def test_gamma_rhs_gives_square_root():
    sol = solve_abm(IvpProblem(HALF, 1.0, 0.0, "gamma(1.5)"), 1024)
    assert np.max(np.abs(sol.y - np.sqrt(sol.mesh.nodes))) <= 1e-12


def test_exponential():
    sol = solve_abm(IvpProblem(FracOrder(1.0), 1.0, 1.0, "y"), 1024)
    assert sol.y[-1] == pytest.approx(math.e, abs=5e-3)


def test_mittag_leffler_oracle():
    sol = solve_abm(LINEAR, 2048)
    assert sol.y[-1] == pytest.approx(oracles.ML_HALF_MINUS_ONE, abs=5e-3)
    assert mittag_leffler_exact(LINEAR, -1.0)(1.0) == pytest.approx(oracles.ML_HALF_MINUS_ONE, rel=1e-13)


def test_initial_value_kept_exactly():
    for y0 in (0.1, -7.25, 1e-300):
        assert solve_abm(IvpProblem(FracOrder(0.3), 2.0, y0, "sin(x*y)"), 50).y[0] == y0


def test_solver_preconditions():
    with pytest.raises(PreconditionError):
        IvpProblem(FracOrder(1.5), 1.0, 0.0, "y")
    with pytest.raises(PreconditionError):
        IvpProblem(HALF, 0.0, 0.0, "y")
    with pytest.raises(PreconditionError):
        solve_abm(LINEAR, 0)
    with pytest.raises(PreconditionError):
        solve_abm(LINEAR, 10, corrector_sweeps=11)


def test_blow_up_reports_step():
    with pytest.raises(NonFiniteError, match="step"):
        solve_abm(IvpProblem(FracOrder(1.0), 3.0, 1.0, "y^2"), 300)


def test_more_sweeps_converge():
    one = solve_abm(LINEAR, 256, 1)
    many = solve_abm(LINEAR, 256, 10)
    assert one.max_correction > 0
    assert abs(many.y[-1] - oracles.ML_HALF_MINUS_ONE) < 5e-3
    assert np.all(many.corrector_iterations[1:] == 10)


# {{{ residuals


def test_residual_examples():
    assert residual_check("x^0.5", COUNTEREXAMPLE, 2049) <= 1e-6
    assert residual_check("0", COUNTEREXAMPLE, 2049) == 0.0
    assert residual_check("x", COUNTEREXAMPLE, 2049) == pytest.approx(oracles.FAMILY_DEFECT, abs=1e-3)


@pytest.mark.parametrize("c", FAMILY_COEFFICIENTS)
def test_power_family_solves_counterexample(c):
    assert residual_check(power_family_member(c, 0.5), COUNTEREXAMPLE, 2049) <= 1e-6


def test_residual_of_solver_output():
    residuals = [residual_check(solve_abm(LINEAR, n), LINEAR) for n in (512, 1024, 2048)]
    assert residuals[-1] <= 1e-2
    assert residuals[-1] <= residuals[0]


def test_residual_of_exact_expression_is_small():
    problem = IvpProblem(FracOrder(0.7), 1.0, 0.0, "2*x^0.3/gamma(1.3)")
    # y = x is the exact solution: D^0.7 x = x^0.3 / Gamma(1.3)
    assert residual_check("x", IvpProblem(FracOrder(0.7), 1.0, 0.0, "x^0.3/gamma(1.3)")) <= 1e-12
    assert residual_check("x", problem) > 0.5


# }}}


# {{{ convergence


def test_eoc_fractional():
    rows = eoc_study(LINEAR, mittag_leffler_exact(LINEAR, -1.0), [64, 128, 256, 512])
    assert rows[0].order is None
    for row in rows[1:]:
        assert row.order == pytest.approx(1.5, abs=0.25)
    errors = [r.error for r in rows]
    assert all(e1 > e2 for e1, e2 in zip(errors, errors[1:]))


def test_eoc_classical():
    problem = IvpProblem(FracOrder(1.0), 1.0, 1.0, "-y")
    rows = eoc_study(problem, "exp(-x)", [64, 128, 256, 512])
    for row in rows[1:]:
        assert row.order == pytest.approx(2.0, abs=0.2)
    errors = [r.error for r in rows]
    assert all(e1 > e2 for e1, e2 in zip(errors, errors[1:]))


def test_eoc_constant_problem_is_exact():
    problem = IvpProblem(HALF, 1.0, 0.0, "gamma(1.5)")
    rows = eoc_study(problem, "x^0.5", [64, 128, 256])
    assert [r.order for r in rows[1:]] == ["exact", "exact"]
    assert max(r.error for r in rows) <= 1e-12


# }}}


# {{{ uniqueness


def test_uniqueness_gap_scales_linearly():
    report = uniqueness_experiment(LINEAR, [1e-3, 1e-6])
    (e1, g1), (e2, g2) = report.gaps
    ratio = (g1 / e1) / (g2 / e2)
    assert 0.1 <= ratio <= 10.0
    assert report.family_residuals == {}
    assert "cannot certify" in report.note


def test_identical_runs_have_zero_gap():
    assert uniqueness_experiment(LINEAR, [0.0]).gaps == [(0.0, 0.0)]


def test_counterexample_family_in_uniqueness_report():
    report = uniqueness_experiment(COUNTEREXAMPLE, [1e-3], n=512)
    for c in (0.0, 0.5, 1.0):
        assert report.family_residuals[c] <= 1e-6


def test_uniqueness_needs_fractional_order():
    with pytest.raises(PreconditionError):
        uniqueness_experiment(IvpProblem(FracOrder(1.0), 1.0, 1.0, "-y"), [1e-3])


# }}}
