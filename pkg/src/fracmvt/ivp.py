"""Caputo initial value problems D^alpha y = f(x, y), y(0) = y0, 0 < alpha <= 1.

The solver is the fractional Adams-Bashforth-Moulton predictor-corrector
applied to the equivalent Volterra equation y = y0 + J^alpha f(., y):
product-rectangle weights predict, the product-trapezoidal weights shared
with ``operators.rl_integral`` correct.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Union

import numpy as np

from . import expr
from .errors import EvalError, NonFiniteError, PreconditionError
from .nagumo import CounterexampleRhs, Rhs2D, as_rhs, uniqueness_gap
from .operators import (
    RESIDUAL_SKIP,
    FracOrder,
    Mesh,
    SampledFunction,
    TaylorPoly,
    caputo_definition,
    caputo_smooth,
    sample,
    trapezoid_weights,
)
from .special import gammafn, mittag_leffler

MAX_STEPS = 2**20
MAX_SWEEPS = 10
FAMILY_COEFFICIENTS = (0.0, 0.25, 0.5, 0.75, 1.0)
LIMITATION = (
    "a discrete solve cannot certify that D^alpha y is continuous on [0, b]; "
    "gaps and residuals are numerical evidence only"
)


@dataclass(frozen=True)
class IvpProblem:
    order: FracOrder
    b: float
    y0: float
    rhs: Rhs2D

    def __post_init__(self) -> None:
        if not 0.0 < self.order.alpha <= 1.0:
            raise PreconditionError(f"IVPs need 0 < alpha <= 1, got {self.order.alpha}")
        if not self.b > 0:
            raise PreconditionError(f"need b > 0, got {self.b}")
        object.__setattr__(self, "rhs", as_rhs(self.rhs))
        object.__setattr__(self, "y0", float(self.y0))
        object.__setattr__(self, "b", float(self.b))


@dataclass(frozen=True)
class IvpSolution:
    mesh: Mesh
    y: np.ndarray
    corrector_iterations: np.ndarray
    max_correction: float

    def sampled(self) -> SampledFunction:
        return SampledFunction(self.mesh, self.y, "computed")


def _rectangle_increments(n: int, alpha: float) -> np.ndarray:
    # d[l] = (l+1)^alpha - l^alpha, written to avoid cancellation for large l
    d = np.ones(n)
    if n > 1:
        l = np.arange(1, n, dtype=float)
        d[1:] = l**alpha * np.expm1(alpha * np.log1p(1.0 / l))
    return d


def solve_abm(problem: IvpProblem, n: int, corrector_sweeps: int = 1) -> IvpSolution:
    """Fractional Adams predictor-corrector with ``n`` uniform steps on [0, b]."""
    if not 1 <= n <= MAX_STEPS:
        raise PreconditionError(f"step count must be in [1, {MAX_STEPS}], got {n}")
    if not 1 <= corrector_sweeps <= MAX_SWEEPS:
        raise PreconditionError(f"corrector sweeps must be in [1, {MAX_SWEEPS}]")

    alpha = problem.order.alpha
    f = problem.rhs
    y0 = problem.y0
    mesh = Mesh(0.0, problem.b, n + 1)
    x = mesh.nodes
    h = mesh.h

    a0, c = trapezoid_weights(n + 1, alpha)
    d = _rectangle_increments(n, alpha)
    pred_scale = h**alpha / gammafn(alpha + 1.0)
    corr_scale = h**alpha / gammafn(alpha + 2.0)

    y = np.empty(n + 1)
    F = np.empty(n + 1)
    y[0] = y0
    F[0] = float(f(0.0, y0))
    if not math.isfinite(F[0]):
        raise NonFiniteError("rhs is not finite at the initial point")
    max_corr = 0.0

    for k in range(n):
        yp = y0 + pred_scale * float(np.dot(d[k::-1], F[: k + 1]))
        history = a0[k + 1] * F[0] + float(np.dot(c[k:0:-1], F[1 : k + 1]))
        yc = yp
        try:
            for _ in range(corrector_sweeps):
                yc = y0 + corr_scale * (history + float(f(x[k + 1], yc)))
            fk = float(f(x[k + 1], yc))
        except EvalError as err:
            raise NonFiniteError(f"non-finite value at step {k + 1} (x={x[k + 1]!r}): {err}") from err
        if not (math.isfinite(yc) and math.isfinite(fk)):
            raise NonFiniteError(f"non-finite value at step {k + 1} (x={x[k + 1]!r})")
        y[k + 1] = yc
        F[k + 1] = fk
        max_corr = max(max_corr, abs(yc - yp))

    iterations = np.full(n + 1, corrector_sweeps, dtype=int)
    iterations[0] = 0
    return IvpSolution(mesh, y, iterations, max_corr)


# {{{ residuals


def residual_check(candidate, problem: IvpProblem, n: int = 1025) -> float:
    """sup_j |D^alpha y(x_j) - f(x_j, y(x_j))|, skipping x_0 and the first five interior nodes.

    Expressions use the smooth Caputo route; sampled candidates (or solver
    output) use the definition route on their own mesh.
    """
    order = problem.order
    if isinstance(candidate, IvpSolution):
        candidate = candidate.sampled()
    if isinstance(candidate, SampledFunction):
        if candidate.mesh.a != 0.0:
            raise PreconditionError("sampled candidate must start at x = 0")
        yv = candidate
        taylor = TaylorPoly(0.0, (float(yv.values[0]),))
        deriv = caputo_definition(yv, order, taylor)
    else:
        ast = expr.compile_expr(candidate)
        mesh = Mesh(0.0, problem.b, n)
        yv = sample(ast, mesh)
        deriv = caputo_smooth(ast, order, mesh)
    rhs = np.broadcast_to(problem.rhs(yv.nodes, yv.values), yv.values.shape)
    diff = np.abs(deriv.values - rhs)[RESIDUAL_SKIP:]
    return float(diff.max()) if diff.size else 0.0


# }}}


# {{{ convergence study


@dataclass(frozen=True)
class EocRow:
    n: int
    error: float
    order: Union[float, str, None]  # None for the first row, "exact" at rounding level


def mittag_leffler_exact(problem: IvpProblem, lam: float) -> Callable[[float], float]:
    """Exact solution y0 E_alpha(lam x^alpha) of D^alpha y = lam y."""
    alpha = problem.order.alpha

    def exact(x: float) -> float:
        return problem.y0 * mittag_leffler(alpha, lam * x**alpha)

    return exact


def _as_exact(exact) -> Callable[[float], float]:
    if callable(exact) and not isinstance(exact, str):
        return exact
    ast = expr.compile_expr(exact)
    return lambda x: expr.evaluate(ast, x)


def eoc_study(problem: IvpProblem, exact, n_list, corrector_sweeps: int = 1) -> list[EocRow]:
    """Errors at x = b and observed orders log(e_prev / e) / log(n / n_prev)."""
    exact_fn = _as_exact(exact)
    ref = exact_fn(problem.b)
    floor = 1e-13 * max(1.0, abs(ref))
    rows = []
    prev = None
    for n in n_list:
        sol = solve_abm(problem, int(n), corrector_sweeps)
        err = abs(sol.y[-1] - ref)
        if prev is None:
            order = None
        elif err <= floor and prev[1] <= floor:
            order = "exact"
        elif err == 0.0 or prev[1] == 0.0:
            order = "exact"
        else:
            order = math.log(prev[1] / err) / math.log(n / prev[0])
        rows.append(EocRow(int(n), float(err), order))
        prev = (n, err)
    return rows


# }}}


# {{{ uniqueness experiment


@dataclass(frozen=True)
class UniquenessReport:
    gaps: list  # (eps, sup of w over the mesh)
    family_residuals: dict = field(default_factory=dict)  # c -> residual of y = c x^alpha
    note: str = LIMITATION


def uniqueness_experiment(problem: IvpProblem, perturbations, n: int = 1024) -> UniquenessReport:
    """Compare the solve from y0 with solves from y0 + eps through the gap functional.

    For the discontinuous counterexample the residuals of y = c x^alpha are
    reported as well; each member solves the equation.
    """
    order = problem.order
    if not 0.0 < order.alpha < 1.0:
        raise PreconditionError(f"uniqueness experiment needs 0 < alpha < 1, got {order.alpha}")
    base = solve_abm(problem, n).sampled()
    gaps = []
    for eps in perturbations:
        eps = float(eps)
        other = base if eps == 0.0 else solve_abm(replace(problem, y0=problem.y0 + eps), n).sampled()
        w = uniqueness_gap(base, other, order)
        gaps.append((eps, float(np.max(w.values))))

    family = {}
    if isinstance(problem.rhs, CounterexampleRhs):
        for coef in FAMILY_COEFFICIENTS:
            candidate = power_family_member(coef, order.alpha)
            family[coef] = residual_check(candidate, problem, n + 1)
    return UniquenessReport(gaps, family)


def power_family_member(coef: float, alpha: float) -> expr.Ast:
    """The expression coef * x^alpha."""
    return expr.BinOp("*", expr.Num(float(coef)), expr.BinOp("^", expr.Var("x"), expr.Num(float(alpha))))


# }}}
