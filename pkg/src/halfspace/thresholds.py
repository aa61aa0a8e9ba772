"""Existence thresholds λ*_N, λ̄, λ̂ and the bound chain for λ*_N."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .constants import N_MAX, expansion_coefficients
from .errors import DomainError
from .numerics import DEFAULT_SPEC, QuadratureSpec, gamma_fn, sphere_area
from .testfun import Exponents

__all__ = [
    "GOLDEN_LAMBDA",
    "ChainCheck",
    "ThresholdReport",
    "lambda_star",
    "lambda_bar",
    "lambda_hat",
    "verify_threshold_chain",
    "threshold_report",
]

GOLDEN_LAMBDA = (3.0 + math.sqrt(5.0)) / 4.0


@dataclass(frozen=True)
class ChainCheck:
    """One displayed inequality ``lhs > rhs`` (or ``<``), with raw values."""

    name: str
    lhs: float
    rhs: float
    relation: str  # "<" or ">"

    @property
    def satisfied(self) -> bool:
        return self.lhs < self.rhs if self.relation == "<" else self.lhs > self.rhs


@dataclass(frozen=True)
class ThresholdReport:
    N: int
    lambda_star: float | None
    lambda_bar: float
    lambda_hat: float
    lower_bound: float | None  # N/4 and (N-2)/2 bracket λ*_N, so N >= 5 only
    upper_bound: float | None
    chain_checks: tuple = field(default_factory=tuple)

    @property
    def all_satisfied(self) -> bool:
        return all(c.satisfied for c in self.chain_checks)


def _check(N: int, lo: int) -> int:
    if int(N) != N or N < lo or N > N_MAX:
        raise DomainError(f"dimension must be an integer in [{lo}, {N_MAX}], got {N!r}")
    return int(N)


def lambda_star(N: int, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """λ*_N = α/d + (2/2*)β/d + (2/2_*)γ/d, for N >= 5."""
    N = _check(N, 5)
    ex = Exponents(N)
    c = expansion_coefficients(N, spec)
    d = c.d_N
    return c.alpha_N / d + (2 / ex.two_star) * c.beta_N / d + (2 / ex.two_lower) * c.gamma_N / d


def lambda_bar(N: int, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    N = _check(N, 3)
    if N == 3:
        return GOLDEN_LAMBDA
    if N == 4:
        return 1.0
    return lambda_star(N, spec)


def lambda_hat(N: int) -> float:
    N = _check(N, 3)
    if N == 3:
        return GOLDEN_LAMBDA
    return N / 4 + (N - 4) / 8


def verify_threshold_chain(N: int, spec: QuadratureSpec = DEFAULT_SPEC) -> ThresholdReport:
    """Evaluate every link of the upper and lower bound chain for λ*_N."""
    N = _check(N, 5)
    c = expansion_coefficients(N, spec)
    lam = lambda_star(N, spec)
    b = c.b
    w = sphere_area(N - 1)
    g = c.Gamma0**2 / gamma_fn(N - 1)
    checks = [
        ChainCheck("C5<C6", c.C5, c.C6, "<"),
        ChainCheck("C2>lower", c.C2, c.C2_lower, ">"),
        ChainCheck("C4>lower", c.C4, c.C4_lower, ">"),
    ]
    # upper bound
    mid = (N - 2) / 2 - math.sqrt(N * (N - 2)) * w / (8 * (N - 3) * b ** (N - 3) * c.C4) * g
    checks.append(ChainCheck("K00:lambda*<mid", lam, mid, "<"))
    checks.append(ChainCheck("K00:mid<(N-2)/2", mid, (N - 2) / 2, "<"))
    # lower bound
    if N == 5:
        bound = 1.5 - 11 * math.sqrt(5) / (80 * math.sqrt(2)) + 1 / 32
        checks.append(ChainCheck("C5<(3/5)C6", c.C5, 0.6 * c.C6, "<"))
        checks.append(ChainCheck("K19:lambda*>bound", lam, bound, ">"))
        checks.append(ChainCheck("K19:bound>N/4", bound, N / 4, ">"))
    elif N == 6:
        bound = 2 - 7 * math.sqrt(3) / (12 * math.sqrt(5)) + 3 / 40
        checks.append(ChainCheck("C5<(2/3)C6", c.C5, 2 / 3 * c.C6, "<"))
        checks.append(ChainCheck("K13:lambda*>bound", lam, bound, ">"))
        checks.append(ChainCheck("K13:bound>N/4", bound, N / 4, ">"))
    else:
        bound = (N - 2) / 2 - 3 * math.sqrt(N) * (N - 4) / (8 * math.sqrt(2 * N - 2)) + (N - 3) * (N - 4) / (
            8 * (2 * N - 2)
        )
        checks.append(ChainCheck("K44:lambda*>bound", lam, bound, ">"))
        checks.append(ChainCheck("K44:bound>N/4", bound, N / 4, ">"))
    checks.append(ChainCheck("lambda*>N/4", lam, N / 4, ">"))
    checks.append(ChainCheck("lambda*<(N-2)/2", lam, (N - 2) / 2, "<"))
    return ThresholdReport(N, lam, lam, lambda_hat(N), N / 4, (N - 2) / 2, tuple(checks))


def threshold_report(N: int, spec: QuadratureSpec = DEFAULT_SPEC) -> ThresholdReport:
    """Report for any N in [3, 12]; the chain is empty below N = 5."""
    N = _check(N, 3)
    if N >= 5:
        return verify_threshold_chain(N, spec)
    return ThresholdReport(N, None, lambda_bar(N, spec), lambda_hat(N), None, None, ())
