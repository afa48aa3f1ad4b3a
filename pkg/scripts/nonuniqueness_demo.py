"""The discontinuous right-hand side and its family of solutions y = c x^alpha.

Reports the Nagumo scan, the residual of each family member, the residual of
y = c x for comparison, and the solver's own trajectory from y(0) = 0.
"""

import argparse
from dataclasses import dataclass, field

import numpy as np

from fracmvt import CounterexampleRhs, FracOrder, IvpProblem, nagumo_scan, residual_check, solve_abm
from fracmvt.ivp import power_family_member


@dataclass
class DemoConfig:
    alpha: float = 0.5
    coefficients: list = field(default_factory=lambda: [0.0, 0.25, 0.5, 0.75, 1.0])
    n: int = 2049
    steps: int = 1024


def main() -> None:
    cfg = DemoConfig()
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--alpha", type=float, default=cfg.alpha)
    cfg.alpha = parser.parse_args().alpha
    order = FracOrder(cfg.alpha)
    rhs = CounterexampleRhs(cfg.alpha)
    problem = IvpProblem(order, 1.0, 0.0, rhs)

    for factor in (1.0, 2.0):
        rep = nagumo_scan(rhs.scaled(factor), order, 1.0, 101, 101, (-1.0, 2.0))
        print(f"scan of {factor:g} f: sup ratio {rep.sup_ratio:.12f} ({rep.verdict})")
    print()
    print(f"{'c':>5} {'residual of c x^alpha':>22} {'residual of c x':>16}")
    for c in cfg.coefficients:
        r_pow = residual_check(power_family_member(c, cfg.alpha), problem, cfg.n)
        r_lin = residual_check(f"{c!r}*x", problem, cfg.n)
        print(f"{c:>5g} {r_pow:>22.3e} {r_lin:>16.6f}")
    sol = solve_abm(problem, cfg.steps)
    c_fit = float(np.max(sol.y[1:] / sol.mesh.nodes[1:] ** cfg.alpha))
    print(f"\nsolver from y(0) = 0 follows y = c x^alpha with c = {c_fit:.6f}")


if __name__ == "__main__":
    main()
