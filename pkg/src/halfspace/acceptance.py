"""The acceptance suite as data: each criterion is a list of named checks.

Both ``halfspace verify-all`` and the test suite run these functions, so
the two always agree on what passed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import asymptotics, constants, fiber, region, spectral, thresholds
from .errors import DomainError, HalfspaceError
from .numerics import DEFAULT_SPEC, QuadratureSpec
from .testfun import Family, TestFunction, gaussian, gaussian_polynomial

__all__ = [
    "Check",
    "CriterionResult",
    "CRITERIA",
    "REGION_CASES",
    "REGION_GRID",
    "hardy_suite",
    "region_case",
    "run_criterion",
]


@dataclass(frozen=True)
class Check:
    label: str
    passed: bool
    value: Optional[float] = None
    bound: Optional[float] = None
    note: str = ""


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    checks: tuple

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def failures(self) -> tuple:
        return tuple(c for c in self.checks if not c.passed)


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def bubble_identity(spec: QuadratureSpec = DEFAULT_SPEC, seed: int = 0, threads: int = 1) -> list:
    out = []
    for N in range(3, 9):
        bc = constants.bubble_constants(N, spec)
        d = abs(bc.K1 - bc.K2 - bc.K3)
        out.append(Check(f"N={N} |K1-K2-K3|/K1", d <= 1e-6 * bc.K1, d / bc.K1, 1e-6))
    return out


def gaussian_eigenvalue(spec: QuadratureSpec = DEFAULT_SPEC, seed: int = 0, threads: int = 1) -> list:
    out = []
    for N in range(3, 9):
        rq = spectral.rayleigh_volume(gaussian(N), spec)
        e = _rel(rq, N / 2)
        out.append(Check(f"N={N} rayleigh(gaussian) vs N/2", e <= 1e-8, e, 1e-8))
    return out


def xi_identity(spec: QuadratureSpec = DEFAULT_SPEC, seed: int = 0, threads: int = 1) -> list:
    out = []
    for N in range(5, 10):
        c = constants.expansion_coefficients(N, spec)
        lhs = (c.alpha_hat_N + c.xi_N) / c.d_hat_N
        e = _rel(lhs, thresholds.lambda_hat(N))
        out.append(Check(f"N={N} (alpha_hat+xi)/d_hat vs lambda_hat", e <= 1e-4, e, 1e-4))
    return out


def threshold_chain(spec: QuadratureSpec = DEFAULT_SPEC, seed: int = 0, threads: int = 1) -> list:
    out = []
    for N in range(5, 13):
        rep = thresholds.verify_threshold_chain(N, spec)
        for c in rep.chain_checks:
            out.append(Check(f"N={N} {c.name}", c.satisfied, c.lhs, c.rhs))
    return out


def closed_forms(spec: QuadratureSpec = DEFAULT_SPEC, seed: int = 0, threads: int = 1) -> list:
    out = []
    for N in range(5, 10):
        c = constants.expansion_coefficients(N, spec)
        for name in ("alpha_hat_N", "d_hat_N", "gamma_hat_N"):
            e = _rel(getattr(c, name), getattr(c, name + "_closed"))
            out.append(Check(f"N={N} {name} quadrature vs closed form", e <= 1e-6, e, 1e-6))
    c3 = constants.expansion_coefficients(5, spec).C3
    d = abs(c3 - math.pi**2 / 8)
    out.append(Check("N=5 C3 vs pi^2/8", d <= 1e-8, d, 1e-8))
    return out


FIT_CASES = (
    ("E", "u", 5, 2.0),
    ("P", "u", 5, 2.0),
    ("V", "u", 5, 2.0),
    ("T", "u", 5, 2.0),
    ("E", "u", 4, 2.0),
    ("P", "u", 4, 2.0),
    ("Q", "u", 4, 2.5),
    ("Q", "u", 3, 3.0),
)


def asymptotic_fits(spec: QuadratureSpec = DEFAULT_SPEC, seed: int = 0, threads: int = 1) -> list:
    out = []
    for quantity, family, N, q in FIT_CASES:
        f, tol = asymptotics.analyze(quantity, family, N, q, spec=spec)
        label = f"N={N} {family} {quantity}" + (f" q={q:g}" if quantity == "Q" else "")
        out.append(Check(label, f.rel_dev <= tol, f.rel_dev, tol))
    return out


SIGN_FLIP_CASES = ((1, 5), (1, 6), (1, 7), (0, 5), (0, 7))
SIGN_FLIP_OFFSET = 0.05


def sign_flip_case(a: int, N: int, spec: QuadratureSpec = DEFAULT_SPEC, threads: int = 1) -> list:
    """Pass above the threshold and fail below it, at the two smallest ε."""
    center = thresholds.lambda_star(N, spec) if a == 1 else thresholds.lambda_hat(N)
    check = fiber.check_condition_a1 if a == 1 else fiber.check_condition_a0
    out = []
    for side, sign in (("above", 1), ("below", -1)):
        rep = check(N, center + sign * SIGN_FLIP_OFFSET, 0.0, spec=spec, threads=threads)
        for row in rep.rows[-2:]:
            ok = row.passes if sign > 0 else not row.passes
            out.append(
                Check(f"a={a} N={N} {side} eps={row.eps:g}", ok, row.margin / row.eps**2, 0.0, "margin/eps^2")
            )
    return out


def sign_flip(spec: QuadratureSpec = DEFAULT_SPEC, seed: int = 0, threads: int = 1) -> list:
    return [c for a, N in SIGN_FLIP_CASES for c in sign_flip_case(a, N, spec, threads)]


HARDY_DIMS = (3, 4, 5)
HARDY_PER_DIM = 10


def hardy_suite(seed: int = 0) -> list:
    """Thirty seeded test functions: Gaussian polynomials and bubbles."""
    rng = np.random.default_rng(seed)
    funcs = []
    for N in HARDY_DIMS:
        for k in range(HARDY_PER_DIM):
            if k < 7:
                coeffs = {(i, j): float(rng.normal()) for i in range(2) for j in range(3) if i + j <= 2}
                funcs.append(gaussian_polynomial(N, coeffs, label=f"poly{k}"))
            else:
                fam = (Family.u_eps, Family.uhat_eps)[k % 2]
                if N == 3:
                    fam = (Family.v_eps, Family.vhat_eps)[k % 2]
                eps = float(rng.uniform(0.05, 0.5))
                funcs.append(TestFunction(fam, N, eps=eps, label=f"{fam.value}{k}"))
    return funcs


def hardy(spec: QuadratureSpec = DEFAULT_SPEC, seed: int = 0, threads: int = 1) -> list:
    out = []
    for tf in hardy_suite(seed):
        h = spectral.hardy_check(tf, spec)
        out.append(Check(f"N={tf.N} {tf.label}", h.holds, h.ratio, 1.0, "rhs/lhs"))
    for N in HARDY_DIMS:
        r = spectral.hardy_check(gaussian(N), spec).ratio
        e = _rel(r, (N + 2) / N)
        out.append(Check(f"N={N} gaussian ratio vs (N+2)/N", e <= 1e-6, e, 1e-6))
    return out


REGION_CASES = ((4, 1, 2.5), (5, 1, 2.0), (7, 0, 2.5))
REGION_GRID = (51, 41)
REGION_MU_RANGE = (-1.0, 1.0)
REGION_RITZ_SIZE = 10


def region_case(N: int, a: int, q: float, spec: QuadratureSpec = DEFAULT_SPEC, threads: int = 1) -> list:
    """Soundness and the μ = 0 breakpoint pattern on one grid."""
    try:
        template = region.ProblemParams(N, a, q)
    except DomainError as exc:
        return [Check(f"N={N} a={a} q={q:g} parameters", False, note=str(exc))]
    L = thresholds.lambda_bar(N, spec) if a == 1 else thresholds.lambda_hat(N)
    mu1 = region.Mu1Bracket(0.0, spectral.estimate_mu1(N, REGION_RITZ_SIZE).value)
    tag = f"N={N} a={a} q={q:g}"
    try:
        rows = region.emit_grid(template, (0.0, float(N)), REGION_MU_RANGE, REGION_GRID, mu1, L, threads)
    except HalfspaceError as exc:
        return [Check(f"{tag} soundness", False, note=str(exc))]
    ok, note = region.check_axis_pattern(rows, N, L)
    return [
        Check(f"{tag} soundness", True, float(len(rows))),
        Check(f"{tag} mu=0 breakpoints", ok, note=note),
    ]


def region_soundness(spec: QuadratureSpec = DEFAULT_SPEC, seed: int = 0, threads: int = 1) -> list:
    return [c for case in REGION_CASES for c in region_case(*case, spec=spec, threads=threads)]


CRITERIA: dict = {
    1: ("bubble identity", bubble_identity),
    2: ("gaussian eigenvalue", gaussian_eigenvalue),
    3: ("xi identity", xi_identity),
    4: ("threshold bounds", threshold_chain),
    5: ("closed form vs quadrature", closed_forms),
    6: ("asymptotic fits", asymptotic_fits),
    7: ("condition sign flip", sign_flip),
    8: ("hardy inequality", hardy),
    9: ("region soundness", region_soundness),
}


def run_criterion(
    number: int, spec: QuadratureSpec = DEFAULT_SPEC, seed: int = 0, threads: int = 1
) -> CriterionResult:
    title, fn = CRITERIA[number]
    return CriterionResult(number, title, tuple(fn(spec, seed, threads)))
