"""Sound classification of (λ, μ) points and grids of verdicts.

Every clause is evaluated at every point. A point matching both an
existence and a nonexistence clause raises SoundnessError, so a grid that
comes back at all is conflict-free.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import DomainError, SoundnessError
from .testfun import Exponents

__all__ = [
    "Verdict",
    "ProblemParams",
    "Mu1Bracket",
    "RegionVerdict",
    "GridRow",
    "NONEXISTENCE_CLAUSES",
    "EXISTENCE_CLAUSES",
    "UNKNOWN_CLAUSE",
    "classify",
    "eta_curve",
    "grid_axis",
    "emit_grid",
    "axis_pattern",
    "check_axis_pattern",
]


class Verdict(str, enum.Enum):
    EXISTS = "ExistsPositive"
    NONE = "NoPositive"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class ProblemParams:
    N: int
    a: int
    q: float
    lam: float = 0.0
    mu: float = 0.0

    def __post_init__(self):
        ex = Exponents(self.N)
        if self.a not in (0, 1):
            raise DomainError("a must be 0 or 1")
        for name in ("q", "lam", "mu"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if not (2.0 <= self.q < ex.two_lower):
            raise DomainError(f"q must lie in [2, {ex.two_lower:g}) for N={self.N}, got {self.q!r}")

    def at(self, lam: float, mu: float) -> "ProblemParams":
        return replace(self, lam=float(lam), mu=float(mu))


@dataclass(frozen=True)
class Mu1Bracket:
    """Known bracket lower <= μ1 <= upper; lower = 0 means no lower bound."""

    lower: float
    upper: float

    def __post_init__(self):
        if not (0.0 <= self.lower < self.upper) or not math.isfinite(self.lower):
            raise DomainError("need 0 <= lower < upper")


@dataclass(frozen=True)
class RegionVerdict:
    verdict: Verdict
    clause: str
    matched: tuple = ()


# Clause predicates take (p, μ1 bracket, Λ*) and never consult μ1 beyond
# what the bracket certifies.
NONEXISTENCE_CLAUSES: tuple = (
    ("none:lambda<N/4;mu=0", lambda p, m, L: p.lam < p.N / 4 and p.mu == 0),
    ("none:lambda<=N/4;mu<0", lambda p, m, L: p.lam <= p.N / 4 and p.mu < 0),
    ("none:lambda>=N/2;mu>=0", lambda p, m, L: p.lam >= p.N / 2 and p.mu >= 0),
    # μ >= μ1 is certified only above the upper end of the bracket
    ("none:q=2;lambda>=0;mu>=mu1", lambda p, m, L: p.q == 2 and p.lam >= 0 and p.mu >= m.upper),
)

EXISTENCE_CLAUSES: tuple = (
    ("exists:mu=0;Lambda*<lambda<N/2", lambda p, m, L: p.mu == 0 and L < p.lam < p.N / 2),
    ("exists:q>2;mu>0;0<=lambda<N/2", lambda p, m, L: p.q > 2 and p.mu > 0 and 0 <= p.lam < p.N / 2),
    # μ < μ1(1 - 2λ/N) is certified only below the lower end of the bracket
    (
        "exists:q=2;0<mu<mu1(1-2lambda/N)",
        lambda p, m, L: p.q == 2 and 0 <= p.lam < p.N / 2 and 0 < p.mu < m.lower * (1 - 2 * p.lam / p.N),
    ),
)

UNKNOWN_CLAUSE = "open"


def classify(p: ProblemParams, mu1: Mu1Bracket, Lambda_star: float) -> RegionVerdict:
    """Verdict for one point; Λ* is λ̄(N) for a = 1 and λ̂(N) for a = 0."""
    if not math.isfinite(Lambda_star):
        raise DomainError("Lambda_star must be finite")
    no = [name for name, f in NONEXISTENCE_CLAUSES if f(p, mu1, Lambda_star)]
    yes = [name for name, f in EXISTENCE_CLAUSES if f(p, mu1, Lambda_star)]
    if no and yes:
        raise SoundnessError(f"point {p} matches {no} and {yes}")
    if yes:
        return RegionVerdict(Verdict.EXISTS, yes[0], tuple(yes))
    if no:
        return RegionVerdict(Verdict.NONE, no[0], tuple(no))
    return RegionVerdict(Verdict.UNKNOWN, UNKNOWN_CLAUSE, ())


def eta_curve(N: int, lam, mu1_value: float):
    """μ on the line 1 - 2λ/N - μ/μ1 = 0."""
    if not mu1_value > 0:
        raise DomainError("mu1_value must be positive")
    mu = mu1_value * (1 - 2 * np.asarray(lam, dtype=float) / N)
    return float(mu) if mu.ndim == 0 else mu


@dataclass(frozen=True)
class GridRow:
    N: int
    a: int
    q: float
    lam: float
    mu: float
    verdict: str
    clause: str

    def record(self) -> dict:
        return {
            "N": self.N,
            "a": self.a,
            "q": self.q,
            "lambda": self.lam,
            "mu": self.mu,
            "verdict": self.verdict,
            "clause": self.clause,
        }


def grid_axis(lo: float, hi: float, steps: int) -> np.ndarray:
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
        raise DomainError("range must be finite with lo <= hi")
    if int(steps) != steps or steps < 2:
        raise DomainError("steps must be an integer >= 2")
    ax = np.linspace(lo, hi, int(steps))
    # keep an exact zero on the axis when the range straddles it
    ax[np.abs(ax) < 1e-12 * max(hi - lo, 1.0)] = 0.0
    return ax


def emit_grid(
    template: ProblemParams,
    lambda_range: Sequence[float],
    mu_range: Sequence[float],
    steps: Sequence[int],
    mu1: Mu1Bracket,
    Lambda_star: float,
    threads: int = 1,
) -> list:
    """Rows over the grid, λ-major; each row is classified independently."""
    lams = grid_axis(lambda_range[0], lambda_range[1], steps[0])
    mus = grid_axis(mu_range[0], mu_range[1], steps[1])

    def row(lam: float) -> list:
        out = []
        for mu in mus:
            v = classify(template.at(lam, mu), mu1, Lambda_star)
            out.append(GridRow(template.N, template.a, template.q, float(lam), float(mu), v.verdict.value, v.clause))
        return out

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(row, lams))
    else:
        blocks = [row(lam) for lam in lams]
    return [r for b in blocks for r in b]


def axis_pattern(rows: Sequence[GridRow]) -> tuple:
    """Run-length compressed verdicts along μ = 0, in λ order.

    Returns (verdict runs, λ values where the verdict changes: the last λ of
    one run paired with the first λ of the next).
    """
    axis = sorted((r for r in rows if r.mu == 0), key=lambda r: r.lam)
    runs: list = []
    edges: list = []
    for prev, cur in zip([None] + axis[:-1], axis):
        if prev is None or cur.verdict != prev.verdict:
            if prev is not None:
                edges.append((prev.lam, cur.lam))
            runs.append(cur.verdict)
    return tuple(runs), tuple(edges)


def check_axis_pattern(rows: Sequence[GridRow], N: int, Lambda_star: float) -> tuple:
    """(ok, message) for the μ = 0 pattern No, Unknown, Exists, No.

    Each verdict change must straddle its breakpoint N/4, Λ* or N/2. The
    Unknown run may be empty when no grid λ falls in [N/4, Λ*].
    """
    runs, edges = axis_pattern(rows)
    no, unk, yes = Verdict.NONE.value, Verdict.UNKNOWN.value, Verdict.EXISTS.value
    if runs == (no, unk, yes, no):
        bps = ((N / 4, N / 4), (Lambda_star, Lambda_star), (N / 2, N / 2))
    elif runs == (no, yes, no):
        bps = ((N / 4, Lambda_star), (N / 2, N / 2))
    else:
        return False, f"verdict runs {runs}"
    for (left, right), (lo_bp, hi_bp) in zip(edges, bps):
        # change from one grid point to the next must enclose the breakpoint
        if not (left <= hi_bp and lo_bp <= right):
            return False, f"change between {left:g} and {right:g} misses [{lo_bp:g}, {hi_bp:g}]"
    return True, "/".join(runs)
