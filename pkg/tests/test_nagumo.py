import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracmvt.errors import MeshMismatchError, PreconditionError
from fracmvt.ivp import IvpProblem, solve_abm
from fracmvt.nagumo import (
    CounterexampleRhs,
    ExprRhs,
    counterexample_rhs,
    nagumo_scan,
    scaled_counterexample,
    uniqueness_gap,
)
from fracmvt.operators import FracOrder, Mesh, sample
from tests import oracles

HALF = FracOrder(0.5)


def test_counterexample_scan_attains_one():
    report = nagumo_scan(counterexample_rhs(HALF), HALF, 1.0, 101, 101, (-1.0, 2.0))
    assert report.sup_ratio == pytest.approx(1.0, abs=1e-9)
    assert report.satisfied
    assert report.verdict == "satisfied on sample"


def test_scaled_counterexample_violates():
    report = nagumo_scan(scaled_counterexample(HALF, 2.0), HALF, 1.0, 101, 101, (-1.0, 2.0))
    assert report.sup_ratio == pytest.approx(2.0, abs=1e-9)
    assert not report.satisfied


def test_expression_with_doubled_slope():
    report = nagumo_scan(ExprRhs("2*gamma(1.5)*y/x^0.5"), HALF, 1.0, 101, 101, (-1.0, 2.0))
    assert report.sup_ratio == pytest.approx(2.0, abs=1e-9)
    assert not report.satisfied


def test_constant_in_y_scans_zero():
    assert nagumo_scan("0", FracOrder(0.3), 1.0).sup_ratio == 0.0
    assert nagumo_scan("sin(x)", FracOrder(0.7), 2.0).sup_ratio == 0.0


@settings(max_examples=20, deadline=None)
@given(st.floats(-5.0, 5.0).filter(lambda c: abs(c) > 1e-3), st.sampled_from(["sin(x*y)", "y^2 - x", "cos(y)*x"]))
def test_scan_homogeneity(c, source):
    order = FracOrder(0.4)
    base = nagumo_scan(source, order, 1.0, 21, 21)
    scaled = nagumo_scan(ExprRhs(source).scaled(c), order, 1.0, 21, 21)
    assert scaled.sup_ratio == pytest.approx(abs(c) * base.sup_ratio, rel=1e-12)


@settings(max_examples=10, deadline=None)
@given(st.sampled_from(["sin(x*y)", "y^2 - x", "abs(y - 0.3)"]), st.floats(0.1, 0.9))
def test_ordered_and_unordered_pairs_agree(source, alpha):
    order = FracOrder(alpha)
    unordered = nagumo_scan(source, order, 1.0, 15, 15)
    ordered = nagumo_scan(source, order, 1.0, 15, 15, ordered=True)
    assert ordered.sup_ratio == unordered.sup_ratio
    assert ordered.samples_used == 2 * unordered.samples_used


def test_scan_preconditions():
    with pytest.raises(PreconditionError):
        nagumo_scan("y", FracOrder(1.0), 1.0)
    with pytest.raises(PreconditionError):
        nagumo_scan("y", HALF, 1.0, y_range=(1.0, 1.0))


@pytest.mark.parametrize(
    "x, y, expected",
    [(0.25, 1.0, oracles.GAMMA_1_5), (0.25, 0.25, oracles.GAMMA_1_5 * 0.5), (0.5, -1.0, 0.0), (0.0, 0.0, 0.0)],
)
def test_counterexample_branches(x, y, expected):
    assert CounterexampleRhs(0.5)(x, y) == pytest.approx(expected, rel=1e-14)


def test_counterexample_vectorised():
    f = CounterexampleRhs(0.5)
    out = f(np.array([0.25, 0.25, 0.5]), np.array([1.0, 0.25, -1.0]))
    np.testing.assert_allclose(out, [oracles.GAMMA_1_5, oracles.GAMMA_1_5 / 2, 0.0])
    with pytest.raises(PreconditionError):
        CounterexampleRhs(1.0)


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.9])
def test_counterexample_discontinuous_at_origin(alpha):
    f = CounterexampleRhs(alpha)
    g1 = math.gamma(alpha + 1)
    xs = np.logspace(-12, 0, 50)
    along = f(xs, xs**alpha / 2)
    np.testing.assert_allclose(along, g1 / 2, rtol=1e-12)
    assert f(0.0, 0.0) == 0.0
    assert abs(along[0] - f(0.0, 0.0)) == pytest.approx(g1 / 2)


def test_gap_examples():
    mesh = Mesh(0.0, 1.0, 5)
    z = sample("x^0.5", mesh)
    np.testing.assert_array_equal(uniqueness_gap(z, z, HALF).values, 0.0)
    zero = sample("0", mesh)
    np.testing.assert_allclose(uniqueness_gap(z, zero, HALF).values[1:], 1.0, rtol=1e-15)
    w = uniqueness_gap(sample("x", mesh), zero, HALF)
    assert w.values[1] == pytest.approx(0.5)
    assert w.values[0] == 0.0


def test_gap_preconditions():
    with pytest.raises(MeshMismatchError):
        uniqueness_gap(sample("x", Mesh(0.0, 1.0, 5)), sample("x", Mesh(0.0, 1.0, 6)), HALF)
    shifted = Mesh(0.5, 1.0, 5)
    with pytest.raises(PreconditionError):
        uniqueness_gap(sample("x", shifted), sample("x", shifted), HALF)


def test_gap_between_solver_runs_is_within_solver_tolerance():
    # one and two corrector sweeps on a Lipschitz problem differ by the corrector error only
    problem = IvpProblem(HALF, 1.0, 1.0, "-y")
    one = solve_abm(problem, 2048, 1).sampled()
    two = solve_abm(problem, 2048, 2).sampled()
    assert np.max(uniqueness_gap(one, two, HALF).values) <= 5e-3
