"""Sampled checks of the fractional Nagumo condition

    x^alpha |f(x, y1) - f(x, y2)| <= Gamma(alpha+1) |y1 - y2|,

the discontinuous right-hand side that defeats uniqueness when f is not
continuous at the initial point, and the gap functional
w(x) = x^-alpha |z(x) - z~(x)| used to compare two solutions.

A scan is a finite certificate: ``satisfied`` means "no violation among the
sampled triples", not a proof.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr
from .errors import PreconditionError
from .operators import FracOrder, SampledFunction, check_same_mesh
from .special import gammafn

SATISFIED_SLACK = 1e-9
PAIR_EXCLUSION = 1e-9


# {{{ right-hand sides


class Rhs2D:
    """Right-hand side f(x, y); calls broadcast over numpy arrays."""

    name = "rhs"

    def __call__(self, x, y):
        raise NotImplementedError

    def scaled(self, factor: float) -> "Rhs2D":
        return ScaledRhs(self, float(factor))


class ExprRhs(Rhs2D):
    def __init__(self, source):
        self.ast = expr.compile_expr(source)
        self.name = expr.pretty(self.ast)

    def __call__(self, x, y):
        shape = np.broadcast(np.asarray(x), np.asarray(y)).shape
        out = expr.evaluate(self.ast, x, y)
        if shape:
            return np.broadcast_to(out, shape)
        return out


class ScaledRhs(Rhs2D):
    def __init__(self, base: Rhs2D, factor: float):
        self.base = base
        self.factor = factor
        self.name = f"{factor!r}*({base.name})"

    def __call__(self, x, y):
        return self.factor * self.base(x, y)


class CounterexampleRhs(Rhs2D):
    """f(x, y) = G for y > x^a;  G x^-a y for 0 < y <= x^a;  0 for y <= 0, with G = Gamma(a+1).

    At x = 0 the middle branch is empty.
    """

    def __init__(self, alpha: float):
        if not 0.0 < alpha < 1.0:
            raise PreconditionError(f"counterexample needs 0 < alpha < 1, got {alpha}")
        self.alpha = float(alpha)
        self.gamma1 = gammafn(self.alpha + 1.0)
        self.name = f"counterexample({self.alpha!r})"

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        xa = np.power(x, self.alpha)
        with np.errstate(divide="ignore", invalid="ignore"):
            middle = self.gamma1 * y / xa
        out = np.where(y > xa, self.gamma1, np.where(y > 0.0, middle, 0.0))
        return float(out) if out.ndim == 0 else out


def counterexample_rhs(order: FracOrder) -> CounterexampleRhs:
    return CounterexampleRhs(order.alpha)


def scaled_counterexample(order: FracOrder, factor: float) -> Rhs2D:
    return CounterexampleRhs(order.alpha).scaled(factor)


def as_rhs(source) -> Rhs2D:
    if isinstance(source, Rhs2D):
        return source
    return ExprRhs(source)


# }}}


# {{{ Nagumo scan


@dataclass(frozen=True)
class NagumoReport:
    sup_ratio: float
    satisfied: bool
    argmax: tuple  # (x, y1, y2)
    samples_used: int

    @property
    def verdict(self) -> str:
        return "satisfied on sample" if self.satisfied else "violated on sample"


def nagumo_scan(f, order: FracOrder, b: float, nx: int = 101, ny: int = 101,
                y_range: tuple = (-1.0, 1.0), *, ordered: bool = False) -> NagumoReport:
    """Largest sampled value of x^alpha |f(x,y1) - f(x,y2)| / (Gamma(alpha+1) |y1 - y2|).

    x runs over b j / nx for j = 1..nx (x = 0 satisfies the condition
    trivially) and y1, y2 over an ny-point grid on ``y_range``. With
    ``ordered`` both (y1, y2) and (y2, y1) are visited.
    """
    alpha = order.alpha
    if not 0.0 < alpha < 1.0:
        raise PreconditionError(f"Nagumo scan needs 0 < alpha < 1, got {alpha}")
    if nx < 3 or ny < 3:
        raise PreconditionError(f"need nx, ny >= 3, got nx={nx}, ny={ny}")
    ylo, yhi = float(y_range[0]), float(y_range[1])
    if not ylo < yhi:
        raise PreconditionError(f"degenerate y range [{ylo}, {yhi}]")
    if not b > 0:
        raise PreconditionError(f"need b > 0, got {b}")

    rhs = as_rhs(f)
    g1 = gammafn(alpha + 1.0)
    xs = b * np.arange(1, nx + 1) / nx
    ys = np.linspace(ylo, yhi, ny)
    if ordered:
        i, j = np.nonzero(~np.eye(ny, dtype=bool))
    else:
        i, j = np.triu_indices(ny, k=1)
    dy = np.abs(ys[i] - ys[j])
    keep = dy >= PAIR_EXCLUSION * (yhi - ylo)
    i, j, dy = i[keep], j[keep], dy[keep]

    best = -1.0
    best_at = (float(xs[0]), float(ys[0]), float(ys[1]))
    for x in xs:
        fy = np.broadcast_to(rhs(x, ys), ys.shape)
        ratio = x**alpha * np.abs(fy[i] - fy[j]) / (g1 * dy)
        k = int(np.argmax(ratio))
        if ratio[k] > best:
            best = float(ratio[k])
            best_at = (float(x), float(ys[i[k]]), float(ys[j[k]]))
    return NagumoReport(best, best <= 1.0 + SATISFIED_SLACK, best_at, len(xs) * len(i))


# }}}


def uniqueness_gap(z: SampledFunction, z_tilde: SampledFunction, order: FracOrder) -> SampledFunction:
    """w(x) = x^-alpha |z(x) - z~(x)| for x > 0 and w(0) = 0."""
    mesh = check_same_mesh(z, z_tilde)
    if mesh.a != 0.0:
        raise PreconditionError(f"gap functional needs a mesh starting at 0, got a={mesh.a}")
    x = mesh.nodes
    w = np.zeros(mesh.n)
    w[1:] = np.abs(z.values[1:] - z_tilde.values[1:]) / x[1:] ** order.alpha
    return SampledFunction(mesh, w, "computed")
