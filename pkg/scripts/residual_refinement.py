"""Refinement study of the fundamental-theorem and Taylor-identity residuals.

Shows which residuals shrink with h and which sit on a plateau. For f = 1 the
quadrature of J^alpha 1 at node j is h^alpha times a number that depends on j
only, so the grid derivative at a fixed node index, and with it the residual
sup over j >= 6, does not change with the mesh.
"""

import argparse
from dataclasses import dataclass, field

from fracmvt import FracOrder, Mesh, fundamental_residual, taylor_remainder_residual


@dataclass
class RefinementConfig:
    functions: list = field(default_factory=lambda: ["1", "x", "sin(x)", "exp(x)"])
    alphas: list = field(default_factory=lambda: [0.3, 0.5, 0.8])
    sizes: list = field(default_factory=lambda: [257, 513, 1025, 2049, 4097])
    b: float = 1.0


def table(title, residual, cfg: RefinementConfig, alphas) -> None:
    print(title)
    print(f"{'f':>8} {'alpha':>6} " + " ".join(f"{'n=' + str(n):>11}" for n in cfg.sizes))
    for f in cfg.functions:
        for alpha in alphas:
            values = [residual(f, FracOrder(alpha), Mesh(0.0, cfg.b, n)) for n in cfg.sizes]
            print(f"{f:>8} {alpha:>6g} " + " ".join(f"{v:>11.3e}" for v in values))
    print()


def main() -> None:
    cfg = RefinementConfig()
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=cfg.sizes)
    parser.add_argument("--alphas", type=float, nargs="+", default=cfg.alphas)
    args = parser.parse_args()
    cfg = RefinementConfig(sizes=args.sizes, alphas=args.alphas)
    table("sup |D^alpha J^alpha f - f| over nodes j >= 6", fundamental_residual, cfg, cfg.alphas)
    table("sup |f - T[f;0] - J^alpha D^alpha f|", taylor_remainder_residual, cfg, cfg.alphas + [1.5])


if __name__ == "__main__":
    main()
