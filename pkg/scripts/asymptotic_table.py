"""Fitted vs predicted expansion coefficients over a range of cases."""

import argparse
from dataclasses import dataclass

from halfspace.asymptotics import DEFAULT_GRID, analyze

CASES = [
    (N, fam, Q)
    for N in (4, 5, 6, 7, 8)
    for fam in ("u", "uhat")
    for Q in ("E", "P", "V", "T")
]


@dataclass
class TableConfig:
    grid: tuple = DEFAULT_GRID
    q_slopes: tuple = ((3, 3.0), (4, 2.5), (4, 2.0), (5, 2.5), (6, 2.2))


def run(cfg: TableConfig) -> None:
    print(f"{'N':>2} {'fam':>5} {'Q':>2} {'fitted':>14} {'predicted':>14} {'rel_dev':>9} {'tol':>5}")
    for N, fam, Q in CASES:
        f, tol = analyze(Q, fam, N, eps_grid=cfg.grid)
        if f.predicted is None:
            continue
        print(f"{N:>2} {fam:>5} {Q:>2} {f.fitted:14.6g} {f.predicted:14.6g} {f.rel_dev:9.2e} {tol:5.2f}")
    print("\nboundary q-norm slopes (u family)")
    for N, q in cfg.q_slopes:
        f, tol = analyze("Q", "u", N, q, eps_grid=cfg.grid)
        print(f"N={N} q={q:g}: slope {f.fitted:.5f}, predicted {f.predicted:.5f}, rel_dev {f.rel_dev:.2e}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--grid", type=float, nargs="+", default=list(DEFAULT_GRID))
    args = p.parse_args()
    run(TableConfig(grid=tuple(args.grid)))
