"""Ritz upper bounds for μ1 against the separable ground-state value Γ((N+1)/2)/Γ(N/2)."""

import argparse

from halfspace.numerics import gamma_fn
from halfspace.spectral import estimate_mu1


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--dims", type=int, nargs="+", default=[3, 4, 5, 6])
    p.add_argument("--size", type=int, default=45)
    args = p.parse_args()
    for N in args.dims:
        target = gamma_fn((N + 1) / 2) / gamma_fn(N / 2)
        est = estimate_mu1(N, args.size)
        print(f"N={N}  separable value {target:.10f}")
        last = None
        for k, v in est.history:
            if v != last:
                print(f"  size {k:3d}  {v:.10f}  excess {v - target:.3e}")
                last = v


if __name__ == "__main__":
    main()
