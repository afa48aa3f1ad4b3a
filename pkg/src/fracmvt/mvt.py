"""Interior witnesses for the fractional mean value theorems.

Integral form:      J^alpha (f g)(x) = f(xi) J^alpha g(x)
Simple form:        J^alpha f(b) = (b-a)^alpha f(xi) / Gamma(alpha+1)
Differential form:  (f(b) - T[f;a](b)) / (b-a)^alpha = D^alpha f(xi) / Gamma(alpha+1)

Each search scans ``value(t) - target`` on a grid over [a, x], takes the
leftmost bracketed sign change and bisects it down to 1e-12 (x - a).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import expr
from .errors import NoWitnessError, SignChangeError
from .operators import (
    FracOrder,
    Mesh,
    caputo_smooth,
    caputo_smooth_at,
    rl_integral_last,
    sample,
    taylor_poly,
)
from .special import gammafn

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8
SIGN_TOL = 1e-12
BISECT_RTOL = 1e-12
REFINEMENTS = (1, 10, 100)
MAX_SCAN_NODES = 20_001  # refined scans that need an O(N^2) quadrature stop here


@dataclass(frozen=True)
class Witness:
    xi: float
    residual: float
    bracket: tuple
    target: float
    degenerate: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "xi", float(self.xi))
        object.__setattr__(self, "residual", float(self.residual))
        object.__setattr__(self, "bracket", (float(self.bracket[0]), float(self.bracket[1])))
        object.__setattr__(self, "target", float(self.target))


# {{{ root location


def _bisect(g: Callable[[float], float], lo: float, hi: float, glo: float, ghi: float, width: float):
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0.0:
            return mid, mid
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi, ghi = mid, gm
    return lo, hi


def _locate(scan, point, target: float, a: float, x: float, n: int, tol: float):
    """Return (xi, (lo, hi), degenerate) for the leftmost interior root of value - target.

    ``scan(N)`` returns the values on an N-node grid over [a, x] (or None when
    that resolution is unaffordable); ``point(t)`` evaluates one point.
    """
    width = BISECT_RTOL * (x - a)

    def g(t: float) -> float:
        return point(t) - target

    for refine in REFINEMENTS:
        size = (n - 1) * refine + 1
        values = scan(size)
        if values is None:
            break
        t = np.linspace(a, x, size)
        s = values - target

        zero = np.flatnonzero(s[1:-1] == 0.0)
        first_zero = zero[0] + 1 if zero.size else None
        cross = np.flatnonzero(s[:-1] * s[1:] < 0.0)
        for i in cross:
            if first_zero is not None and first_zero <= i:
                break
            lo, hi = t[i], t[i + 1]
            glo, ghi = g(lo), g(hi)
            if glo * ghi > 0.0:
                # point evaluation disagrees with the scan near the root; widen once
                lo, hi = t[max(i - 1, 0)], t[min(i + 2, size - 1)]
                glo, ghi = g(lo), g(hi)
            if glo == 0.0 and a < lo:
                return lo, (lo, lo), False
            if ghi == 0.0 and hi < x:
                return hi, (hi, hi), False
            if glo * ghi < 0.0:
                lo, hi = _bisect(g, lo, hi, glo, ghi, width)
                return 0.5 * (lo + hi), (lo, hi), False
        if first_zero is not None:
            xi = t[first_zero]
            return xi, (xi, xi), False

        near = np.flatnonzero(np.abs(s[1:-1]) < tol)
        if near.size:
            xi = t[near[0] + 1]
            return xi, (xi, xi), True
        logger.debug("no sign change at %d scan points, refining", size)

    raise NoWitnessError(
        f"no interior point attains target {target!r} on ({a}, {x}); "
        "the quadrature error probably exceeds the tolerance"
    )


def _degenerate(a: float, x: float, target: float, residual: float) -> Witness:
    mid = 0.5 * (a + x)
    return Witness(mid, residual, (mid, mid), target, True)


# }}}


def integral_mvt_witness(f, g, order: FracOrder, a: float, x: float, n: int = 1025,
                         tol: float = DEFAULT_TOL) -> Witness:
    """Find xi in (a, x) with J^alpha (f g)(x) = f(xi) J^alpha g(x).

    g must not change sign on [a, x]; this is checked on the samples.
    """
    f = expr.compile_expr(f)
    g = expr.compile_expr(g)
    mesh = Mesh(a, x, n)
    fv = sample(f, mesh).values
    gv = sample(g, mesh).values
    if np.any(gv > SIGN_TOL) and np.any(gv < -SIGN_TOL):
        i = int(np.argmax(gv))
        j = int(np.argmin(gv))
        raise SignChangeError(
            f"g changes sign on [{a}, {x}]: g({mesh.nodes[i]:.6g}) = {gv[i]:.6g}, "
            f"g({mesh.nodes[j]:.6g}) = {gv[j]:.6g}"
        )
    if np.all(np.abs(gv) <= SIGN_TOL):
        # g == 0: both sides vanish
        return _degenerate(a, x, 0.0, 0.0)

    weighted = rl_integral_last(fv * gv, mesh.h, order.alpha)
    base = rl_integral_last(gv, mesh.h, order.alpha)
    target = weighted / base

    def point(t: float) -> float:
        return expr.evaluate(f, t)

    if np.all(np.abs(fv - target) <= tol):
        mid = 0.5 * (a + x)
        return _degenerate(a, x, target, abs(weighted - point(mid) * base))

    def scan(size: int):
        return np.broadcast_to(expr.evaluate(f, np.linspace(a, x, size)), (size,))

    xi, bracket, degenerate = _locate(scan, point, target, a, x, n, tol)
    return Witness(xi, abs(weighted - point(xi) * base), bracket, target, degenerate)


def simple_integral_mvt_witness(f, order: FracOrder, a: float, b: float, n: int = 1025,
                                tol: float = DEFAULT_TOL) -> Witness:
    """Find xi in (a, b) with J^alpha f(b) = (b-a)^alpha f(xi) / Gamma(alpha+1)."""
    f = expr.compile_expr(f)
    mesh = Mesh(a, b, n)
    fv = sample(f, mesh).values
    integral = rl_integral_last(fv, mesh.h, order.alpha)
    scale = (b - a) ** order.alpha / gammafn(order.alpha + 1.0)
    target = integral / scale

    def point(t: float) -> float:
        return expr.evaluate(f, t)

    if np.all(np.abs(fv - target) <= tol):
        mid = 0.5 * (a + b)
        return _degenerate(a, b, target, abs(integral - scale * point(mid)))

    def scan(size: int):
        return np.broadcast_to(expr.evaluate(f, np.linspace(a, b, size)), (size,))

    xi, bracket, degenerate = _locate(scan, point, target, a, b, n, tol)
    return Witness(xi, abs(integral - scale * point(xi)), bracket, target, degenerate)


def differential_mvt_witness(f, order: FracOrder, a: float, b: float, n: int = 1025,
                             tol: float = DEFAULT_TOL) -> Witness:
    """Find xi in (a, b) with D^alpha f(xi) = Gamma(alpha+1) (f(b) - T[f;a](b)) / (b-a)^alpha.

    T is the Taylor polynomial of degree ceil(alpha) - 1 at a; for
    0 < alpha <= 1 it is the constant f(a).
    """
    f = expr.compile_expr(f)
    taylor = taylor_poly(f, a, order.ceil_m - 1)
    remainder = expr.evaluate(f, b) - taylor(b)
    target = gammafn(order.alpha + 1.0) * remainder / (b - a) ** order.alpha

    def point(t: float) -> float:
        return caputo_smooth_at(f, order, a, t, n)

    deriv = caputo_smooth(f, order, Mesh(a, b, n))
    if np.all(np.abs(deriv.values - target) <= tol):
        mid = 0.5 * (a + b)
        return _degenerate(a, b, target, abs(point(mid) - target))

    def scan(size: int):
        if size == n:
            return deriv.values
        if deriv.provenance != "analytic" and size > MAX_SCAN_NODES:
            return None
        return caputo_smooth(f, order, Mesh(a, b, size)).values

    xi, bracket, degenerate = _locate(scan, point, target, a, b, n, tol)
    return Witness(xi, abs(point(xi) - target), bracket, target, degenerate)
