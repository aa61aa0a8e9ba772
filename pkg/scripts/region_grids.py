"""Write (λ, μ) verdict grids for several (N, a, q) to a directory of CSV files."""

import argparse
from dataclasses import dataclass
from pathlib import Path

from halfspace.region import Mu1Bracket, ProblemParams, check_axis_pattern, emit_grid
from halfspace.report import to_csv
from halfspace.spectral import estimate_mu1
from halfspace.thresholds import lambda_bar, lambda_hat


@dataclass
class GridConfig:
    cases: tuple = ((3, 1, 2.0), (4, 1, 2.5), (5, 1, 2.0), (6, 0, 2.2), (7, 0, 2.2))
    lambda_steps: int = 51
    mu_steps: int = 41
    mu_span: float = 1.5
    ritz_size: int = 15


def run(cfg: GridConfig, outdir: Path) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    for N, a, q in cfg.cases:
        L = lambda_bar(N) if a == 1 else lambda_hat(N)
        mu1 = Mu1Bracket(0.0, estimate_mu1(N, cfg.ritz_size).value)
        rows = emit_grid(ProblemParams(N, a, q), (0.0, float(N)), (-cfg.mu_span, cfg.mu_span),
                         (cfg.lambda_steps, cfg.mu_steps), mu1, L)
        path = outdir / f"region_N{N}_a{a}_q{q:g}.csv"
        path.write_text(to_csv([r.record() for r in rows]))
        ok, note = check_axis_pattern(rows, N, L)
        counts = {v: sum(r.verdict == v for r in rows) for v in ("ExistsPositive", "NoPositive", "Unknown")}
        print(f"{path.name}: {counts}  mu=0 axis {note} ({'ok' if ok else 'BAD'})")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", type=Path, default=Path("region_grids"))
    args = p.parse_args()
    run(GridConfig(), args.out)
