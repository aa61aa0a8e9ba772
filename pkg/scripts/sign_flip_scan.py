"""Scan (level - target)/ε² across ε on both sides of the existence threshold.

Shows where the sign of the margin settles. At N = 5 the ε³ remainder of the
mass term keeps the margin negative above λ*_5 until ε is near 0.01.

    python scripts/sign_flip_scan.py --dims 5 6 7 --offsets -0.05 0.05
"""

import argparse
from dataclasses import dataclass, field

from halfspace.fiber import check_condition_a0, check_condition_a1
from halfspace.thresholds import lambda_hat, lambda_star


@dataclass
class ScanConfig:
    dims: tuple = (5, 6, 7)
    a: int = 1
    offsets: tuple = (-0.05, 0.05)
    eps: tuple = field(default=(0.1, 0.05, 0.03, 0.02, 0.014, 0.01, 0.007, 0.005))


def run(cfg: ScanConfig) -> None:
    check = check_condition_a1 if cfg.a == 1 else check_condition_a0
    print("N,a,lambda,offset,eps,margin_over_eps2,passes")
    for N in cfg.dims:
        center = lambda_star(N) if cfg.a == 1 else lambda_hat(N)
        for off in cfg.offsets:
            rep = check(N, center + off, 0.0, eps_list=cfg.eps)
            for row, m in zip(rep.rows, rep.normalized_margins):
                print(f"{N},{cfg.a},{center + off:.6f},{off:+.3f},{row.eps:g},{m:.6g},{row.passes}")


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--dims", type=int, nargs="+", default=[5, 6, 7])
    p.add_argument("--a", type=int, choices=(0, 1), default=1)
    p.add_argument("--offsets", type=float, nargs="+", default=[-0.05, 0.05])
    p.add_argument("--eps", type=float, nargs="+", default=None)
    args = p.parse_args()
    cfg = ScanConfig(tuple(args.dims), args.a, tuple(args.offsets))
    if args.eps:
        cfg.eps = tuple(args.eps)
    run(cfg)


if __name__ == "__main__":
    main()
