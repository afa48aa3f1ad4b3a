"""Riemann-Liouville integrals and Caputo derivatives on uniform meshes.

The fractional integral of order beta > 0 is discretised by product
trapezoidal quadrature: the piecewise linear interpolant of f is integrated
exactly against the kernel (x_j - t)^(beta-1) / Gamma(beta). On a uniform mesh
with spacing h this gives

    J^beta f(x_j) ~ h^beta / Gamma(beta+2) * (a0(j) f_0 + sum_{i=1}^{j-1} c(j-i) f_i + f_j)

with p = beta + 1,

    a0(q) = (q-1)^p - (q-1-beta) q^beta
    c(k)  = (k+1)^p - 2 k^p + (k-1)^p.

Both expressions cancel catastrophically for large arguments; there they are
replaced by their convergent expansions in 1/k (see ``trapezoid_weights``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from . import expr
from .errors import (
    DifferentiationError,
    DomainError,
    EvalError,
    MeshMismatchError,
    NonFiniteError,
    PreconditionError,
)
from .special import gammafn

# Nodes skipped at the left end when a grid-differentiated quantity enters a
# residual sup: x_0 plus the first five interior nodes.
RESIDUAL_SKIP = 6


# {{{ data types


@dataclass(frozen=True)
class Mesh:
    a: float
    b: float
    n: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise PreconditionError(f"mesh endpoints must be finite: [{self.a}, {self.b}]")
        if not self.b > self.a:
            raise PreconditionError(f"mesh needs b > a, got [{self.a}, {self.b}]")
        if int(self.n) != self.n or self.n < 2:
            raise PreconditionError(f"mesh needs at least 2 nodes, got n={self.n}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "n", int(self.n))

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.n - 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        x = self.a + np.arange(self.n) * self.h
        x[-1] = self.b
        x.setflags(write=False)
        return x

    def same_as(self, other: "Mesh") -> bool:
        return (self.a, self.b, self.n) == (other.a, other.b, other.n)


@dataclass(frozen=True)
class FracOrder:
    alpha: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise PreconditionError(f"order must be positive, got alpha={self.alpha}")
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def ceil_m(self) -> int:
        return math.ceil(self.alpha)

    @property
    def gap(self) -> float:
        return self.ceil_m - self.alpha

    @property
    def is_integer(self) -> bool:
        return self.gap == 0.0


@dataclass(frozen=True)
class SampledFunction:
    mesh: Mesh
    values: np.ndarray
    provenance: str = "computed"  # "analytic" or "computed"

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.shape != (self.mesh.n,):
            raise PreconditionError(
                f"expected {self.mesh.n} values, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise NonFiniteError(
                f"non-finite sample at node {bad} (x={self.mesh.nodes[bad]!r})"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def nodes(self) -> np.ndarray:
        return self.mesh.nodes


@dataclass(frozen=True)
class TaylorPoly:
    center: float
    coeffs: tuple = field(default=(0.0,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        t = np.asarray(x, dtype=float) - self.center
        acc = np.zeros_like(t) + self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * t + c
        return float(acc) if acc.ndim == 0 else acc


def sample(f, mesh: Mesh) -> SampledFunction:
    """Evaluate an expression (or its source text) at every mesh node."""
    ast = expr.compile_expr(f)
    values = np.broadcast_to(expr.evaluate(ast, mesh.nodes), (mesh.n,))
    return SampledFunction(mesh, values, "analytic")


# }}}


# {{{ product trapezoidal weights

_SERIES_FROM = 8
_C_TERMS = 12
_A0_TERMS = 26


def _gbinom(p: float, r: int) -> float:
    out = 1.0
    for i in range(r):
        out *= (p - i) / (i + 1)
    return out


@lru_cache(maxsize=64)
def trapezoid_weights(n: int, beta: float) -> tuple[np.ndarray, np.ndarray]:
    """Return (a0, c): a0[q] for q = 0..n-1 and c[k] for k = 0..n-1.

    For k >= 8:
        c(k)  = 2 k^p sum_{m>=1} binom(p, 2m) k^(-2m)
        a0(q) = q^beta sum_{m>=1} (-1)^(m+1) binom(p, m+1) q^(-m)
    """
    p = beta + 1.0
    k = np.arange(n, dtype=float)

    c = np.zeros(n)
    a0 = np.zeros(n)
    small = np.arange(1, min(n, _SERIES_FROM))
    ks = k[small]
    c[small] = (ks + 1.0) ** p - 2.0 * ks**p + (ks - 1.0) ** p
    a0[small] = (ks - 1.0) ** p - (ks - 1.0 - beta) * ks**beta

    if n > _SERIES_FROM:
        kl = k[_SERIES_FROM:]
        inv2 = 1.0 / (kl * kl)
        acc = np.zeros_like(kl)
        term = np.ones_like(kl)
        for m in range(1, _C_TERMS + 1):
            term = term * inv2
            acc += _gbinom(p, 2 * m) * term
        c[_SERIES_FROM:] = 2.0 * kl**p * acc

        inv = 1.0 / kl
        acc = np.zeros_like(kl)
        term = np.ones_like(kl)
        for m in range(1, _A0_TERMS + 1):
            term = term * inv
            acc += (-1.0) ** (m + 1) * _gbinom(p, m + 1) * term
        a0[_SERIES_FROM:] = kl**beta * acc

    c.setflags(write=False)
    a0.setflags(write=False)
    return a0, c


def _trapezoid_row(values: np.ndarray, j: int, a0: np.ndarray, c: np.ndarray) -> float:
    # fixed ascending order over i: a0*f_0, then c(j-i) f_i, then f_j
    if j == 0:
        return 0.0
    return a0[j] * values[0] + float(np.dot(c[j - 1 : 0 : -1], values[1:j])) + values[j]


# }}}


# {{{ Riemann-Liouville integral


def rl_integral(f: SampledFunction, beta: float) -> SampledFunction:
    """Riemann-Liouville integral J^beta f at every mesh node."""
    beta = float(beta)
    if not beta >= 0.0:
        raise PreconditionError(f"integral order must be >= 0, got beta={beta}")
    if beta == 0.0:
        return f

    mesh = f.mesh
    a0, c = trapezoid_weights(mesh.n, beta)
    scale = mesh.h**beta / gammafn(beta + 2.0)
    v = f.values
    out = np.empty(mesh.n)
    for j in range(mesh.n):
        out[j] = scale * _trapezoid_row(v, j, a0, c)
    return SampledFunction(mesh, out, "computed")


def rl_integral_last(values: np.ndarray, h: float, beta: float) -> float:
    """J^beta at the last node only, for samples on a uniform mesh of spacing h."""
    if beta == 0.0:
        return float(values[-1])
    n = len(values)
    a0, c = trapezoid_weights(n, float(beta))
    return h**beta / gammafn(beta + 2.0) * _trapezoid_row(values, n - 1, a0, c)


# }}}


# {{{ Taylor polynomial


def _finite_difference(ast, a: float, k: int) -> float:
    h = 1e-5 * (1.0 + abs(a))
    weights = [(-1) ** i * math.comb(k, i) for i in range(k + 1)]
    try:
        pts = [a + (k / 2.0 - i) * h for i in range(k + 1)]
        vals = [expr.evaluate(ast, t) for t in pts]
    except EvalError:
        # one-sided when the central stencil leaves the domain
        pts = [a + (k - i) * h for i in range(k + 1)]
        vals = [expr.evaluate(ast, t) for t in pts]
    return math.fsum(w * v for w, v in zip(weights, vals)) / h**k


def taylor_poly(f, a: float, m: int) -> TaylorPoly:
    """Degree-m Taylor polynomial of f at a, coefficients f^(k)(a)/k!.

    Derivatives are symbolic; if an expression cannot be differentiated
    symbolically the remaining coefficients come from finite differences.
    """
    if m < 0:
        raise PreconditionError(f"Taylor degree must be >= 0, got {m}")
    ast = expr.compile_expr(f)
    coeffs = [expr.evaluate(ast, a)]
    deriv = ast
    symbolic = True
    for k in range(1, m + 1):
        if symbolic:
            try:
                deriv = expr.differentiate(deriv, "x")
            except DifferentiationError:
                symbolic = False
        if symbolic:
            value = expr.evaluate(deriv, a)
        else:
            value = _finite_difference(ast, a, k)
        coeffs.append(value / math.factorial(k))
    return TaylorPoly(float(a), tuple(coeffs))


# }}}


# {{{ Caputo derivative: power rule


def _merge(terms: list) -> list:
    acc: dict = {}
    for coef, power in terms:
        acc[power] = acc.get(power, 0.0) + coef
    return [(c, p) for p, c in sorted(acc.items()) if c != 0.0]


def power_terms(node, a: float):
    """Decompose ``node`` as sum c_i (x - a)^p_i with p_i >= 0, or return None."""
    if isinstance(node, expr.Num):
        return _merge([(node.value, 0.0)])
    if isinstance(node, expr.Const):
        return [(expr.CONSTANTS[node.name], 0.0)]
    if isinstance(node, expr.Var):
        if node.name != "x":
            return None
        return _merge([(1.0, 1.0), (a, 0.0)])
    if isinstance(node, expr.Neg):
        inner = power_terms(node.operand, a)
        return None if inner is None else [(-c, p) for c, p in inner]
    if isinstance(node, expr.Call):
        if node.name == "sqrt":
            return _power_of(power_terms(node.args[0], a), 0.5)
        if node.name == "pow" and isinstance(node.args[1], expr.Num):
            return _power_of(power_terms(node.args[0], a), node.args[1].value)
        return None
    if not isinstance(node, expr.BinOp):
        return None

    left = power_terms(node.left, a)
    if node.op == "^":
        if not isinstance(node.right, expr.Num):
            return None
        return _power_of(left, node.right.value)
    right = power_terms(node.right, a)
    if left is None or right is None:
        return None
    if node.op == "+":
        return _merge(left + right)
    if node.op == "-":
        return _merge(left + [(-c, p) for c, p in right])
    if node.op == "*":
        return _merge([(c1 * c2, p1 + p2) for c1, p1 in left for c2, p2 in right])
    if node.op == "/":
        if len(right) == 1 and right[0][1] == 0.0:
            return [(c / right[0][0], p) for c, p in left]
        return None
    return None


def _power_of(terms, expo: float):
    if terms is None:
        return None
    if not terms:
        return [] if expo > 0 else None
    if len(terms) == 1:
        c, p = terms[0]
        if c < 0 and not float(expo).is_integer():
            return None
        new_p = p * expo
        if new_p < 0:
            return None
        return [(c**expo, new_p)]
    if float(expo).is_integer() and 0 <= expo <= 12:
        out = [(1.0, 0.0)]
        for _ in range(int(expo)):
            out = _merge([(c1 * c2, p1 + p2) for c1, p1 in out for c2, p2 in terms])
        return out
    return None


def _power_rule_coefficients(terms: list, order: FracOrder):
    """Map c (x-a)^p to its Caputo derivative, or None if the rule does not apply."""
    alpha, m = order.alpha, order.ceil_m
    out = []
    for c, p in terms:
        if float(p).is_integer() and p < m:
            continue  # annihilated Taylor part
        if p <= m - 1:
            return None
        try:
            factor = gammafn(p + 1.0) / gammafn(p + 1.0 - alpha)
        except DomainError:
            return None
        out.append((c * factor, p - alpha))
    return out


def _eval_terms(terms: list, t):
    t = np.asarray(t, dtype=float)
    acc = np.zeros_like(t)
    with np.errstate(divide="ignore"):
        for c, q in terms:
            acc = acc + c * np.power(t, q)
    return acc


def caputo_power_rule(f, order: FracOrder, a: float):
    """Exact Caputo coefficients for sums of powers of (x - a), or None.

    D^alpha (x-a)^p = Gamma(p+1)/Gamma(p+1-alpha) (x-a)^(p-alpha), and zero for
    integer p below ceil(alpha).
    """
    terms = power_terms(expr.compile_expr(f), a)
    if terms is None:
        return None
    return _power_rule_coefficients(terms, order)


# }}}


# {{{ Caputo derivative: smooth route and definition route


def _derivative_ast(ast, m: int):
    for _ in range(m):
        ast = expr.differentiate(ast, "x")
    return ast


def caputo_smooth(f, order: FracOrder, mesh: Mesh, *, power_rule: bool = True) -> SampledFunction:
    """Caputo derivative as J^(ceil(alpha)-alpha) applied to the symbolic D^ceil(alpha) f.

    Sums of powers of (x - a) are differentiated exactly by the power rule
    unless ``power_rule`` is False.
    """
    ast = expr.compile_expr(f)
    if power_rule:
        coeffs = caputo_power_rule(ast, order, mesh.a)
        if coeffs is not None:
            values = _eval_terms(coeffs, mesh.nodes - mesh.a)
            return SampledFunction(mesh, values, "analytic")

    deriv = sample(_derivative_ast(ast, order.ceil_m), mesh)
    if order.is_integer:
        return deriv
    return rl_integral(deriv, order.gap)


def caputo_smooth_at(f, order: FracOrder, a: float, x: float, n: int, *, power_rule: bool = True) -> float:
    """Caputo derivative at the single point x, using an n-node mesh on [a, x]."""
    ast = expr.compile_expr(f)
    if power_rule:
        coeffs = caputo_power_rule(ast, order, a)
        if coeffs is not None:
            value = float(_eval_terms(coeffs, x - a))
            if not math.isfinite(value):
                raise NonFiniteError(f"Caputo derivative is not finite at x={x!r}")
            return value
    deriv = _derivative_ast(ast, order.ceil_m)
    if order.is_integer:
        return expr.evaluate(deriv, x)
    if x == a:
        # J^gap of a bounded function vanishes at the starting point
        expr.evaluate(deriv, a)
        return 0.0
    mesh = Mesh(a, x, n)
    values = np.broadcast_to(expr.evaluate(deriv, mesh.nodes), (n,))
    if not np.all(np.isfinite(values)):
        raise NonFiniteError(f"D^{order.ceil_m} f is not finite on [{a}, {x}]")
    return rl_integral_last(values, mesh.h, order.gap)


def caputo_definition(f: SampledFunction, order: FracOrder, taylor: TaylorPoly) -> SampledFunction:
    """Caputo derivative from its definition: d/dx J^(1-alpha) [f - T_0[f; a]].

    Only 0 < alpha <= 1. The outer derivative is taken on the grid with
    central differences inside and second-order one-sided ones at the ends.
    """
    if not 0.0 < order.alpha <= 1.0:
        raise PreconditionError(
            f"grid route supports 0 < alpha <= 1 only, got alpha={order.alpha}"
        )
    mesh = f.mesh
    if taylor.center != mesh.a or taylor.degree != order.ceil_m - 1:
        raise PreconditionError(
            f"Taylor polynomial must be centred at {mesh.a} with degree {order.ceil_m - 1}"
        )
    remainder = SampledFunction(mesh, f.values - taylor(mesh.nodes))
    integral = rl_integral(remainder, order.gap)
    edge = 2 if mesh.n >= 3 else 1
    deriv = np.gradient(integral.values, mesh.h, edge_order=edge)
    return SampledFunction(mesh, deriv, "computed")


# }}}


# {{{ identity residuals


def fundamental_residual(f, order: FracOrder, mesh: Mesh) -> float:
    """sup |D^alpha J^alpha f - f| with the Caputo derivative from its definition."""
    if not 0.0 < order.alpha <= 1.0:
        raise PreconditionError(f"fundamental check needs 0 < alpha <= 1, got {order.alpha}")
    fs = sample(f, mesh)
    integral = rl_integral(fs, order.alpha)
    t0 = TaylorPoly(mesh.a, (float(integral.values[0]),))
    deriv = caputo_definition(integral, order, t0)
    diff = np.abs(deriv.values - fs.values)[RESIDUAL_SKIP:]
    return float(diff.max()) if diff.size else 0.0


def taylor_remainder_residual(f, order: FracOrder, mesh: Mesh) -> float:
    """sup |f - T_{ceil(alpha)-1}[f; a] - J^alpha D^alpha f| over the mesh."""
    ast = expr.compile_expr(f)
    fs = sample(ast, mesh)
    taylor = taylor_poly(ast, mesh.a, order.ceil_m - 1)
    deriv = caputo_smooth(ast, order, mesh)
    integral = rl_integral(deriv, order.alpha)
    diff = fs.values - taylor(mesh.nodes) - integral.values
    return float(np.max(np.abs(diff)))


def check_same_mesh(*fs: SampledFunction) -> Mesh:
    mesh = fs[0].mesh
    for g in fs[1:]:
        if not g.mesh.same_as(mesh):
            raise MeshMismatchError("sampled functions live on different meshes")
    return mesh


# }}}
