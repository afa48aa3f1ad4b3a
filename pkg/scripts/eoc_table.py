"""Convergence table of the fractional Adams solver on D^alpha y = lam y, y(0) = 1.

    python scripts/eoc_table.py --alphas 0.3 0.5 0.8 1.0 --lam -1
"""

import argparse
from dataclasses import dataclass, field

from fracmvt import FracOrder, IvpProblem, eoc_study, mittag_leffler_exact


@dataclass
class EocConfig:
    alphas: list = field(default_factory=lambda: [0.3, 0.5, 0.8, 1.0])
    lam: float = -1.0
    b: float = 1.0
    n_list: list = field(default_factory=lambda: [64, 128, 256, 512, 1024])
    sweeps: int = 1


def run(cfg: EocConfig) -> None:
    print(f"D^alpha y = {cfg.lam:g} y, y(0) = 1 on [0, {cfg.b:g}], {cfg.sweeps} corrector sweep(s)")
    print(f"{'alpha':>6} {'n':>6} {'error at b':>14} {'order':>7}   expected min(1 + alpha, 2)")
    for alpha in cfg.alphas:
        problem = IvpProblem(FracOrder(alpha), cfg.b, 1.0, f"{cfg.lam!r}*y")
        rows = eoc_study(problem, mittag_leffler_exact(problem, cfg.lam), cfg.n_list, cfg.sweeps)
        for row in rows:
            order = "" if row.order is None else (row.order if isinstance(row.order, str) else f"{row.order:.3f}")
            print(f"{alpha:>6g} {row.n:>6d} {row.error:>14.6e} {order:>7}")
        print(f"{'':>6} {'':>6} {'':>14} {'':>7}   {min(1 + alpha, 2):.2f}")


def main() -> None:
    cfg = EocConfig()
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--alphas", type=float, nargs="+", default=cfg.alphas)
    parser.add_argument("--lam", type=float, default=cfg.lam)
    parser.add_argument("--b", type=float, default=cfg.b)
    parser.add_argument("--n-list", type=int, nargs="+", default=cfg.n_list)
    parser.add_argument("--sweeps", type=int, default=cfg.sweeps)
    args = parser.parse_args()
    run(EocConfig(args.alphas, args.lam, args.b, args.n_list, args.sweeps))


if __name__ == "__main__":
    main()
