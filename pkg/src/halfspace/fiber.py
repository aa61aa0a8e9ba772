"""Fiber maps t ↦ I(t·u) and the mountain-pass level conditions.

For a test function u the energy along the ray t·u is

    g(t) = ½(E − λP)t² − (aV/2*) t^{2*} − (T/2_*) t^{2_*} − (μQ/q) t^q

with E = ‖u‖², P = ‖u‖²_{L²_K}, V = ‖u‖^{2*}_{L^{2*}_K}, T and Q the
boundary L^{2_*}_K and L^q_K powers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Iterable, Sequence

from .constants import bubble_constants, expansion_coefficients, trace_constants
from .errors import DomainError, GeometryError, NonConvergence
from .numerics import DEFAULT_SPEC, QuadratureSpec
from .testfun import (
    Exponents,
    Family,
    TestFunction,
    norm_Lp_K_boundary,
    norm_Lp_K_volume,
    norm_grad_K,
)

__all__ = [
    "DEFAULT_CONDITION_EPS",
    "FiberCoefficients",
    "FiberMax",
    "ConditionRow",
    "ConditionReport",
    "measure_coefficients",
    "maximize_fiber",
    "fiber_value",
    "check_condition_a1",
    "check_condition_a0",
    "eps2_coefficient_a1",
    "eps2_coefficient_a0",
]

DEFAULT_CONDITION_EPS = (0.1, 0.07, 0.05, 0.03, 0.02)

_FAMILY_DIMS = {
    Family.u_eps: None,
    Family.uhat_eps: None,
    Family.v_eps: 3,
    Family.vhat_eps: 3,
}


@dataclass(frozen=True)
class FiberCoefficients:
    N: int
    E: float
    P: float
    V: float
    T: float
    Q: float
    a: int = 1
    q: float = 2.0
    lam: float = 0.0
    mu: float = 0.0
    family: str = ""
    eps: float = math.nan

    @property
    def exps(self) -> Exponents:
        return Exponents(self.N)

    def with_params(self, *, lam=None, mu=None, a=None) -> "FiberCoefficients":
        return replace(
            self,
            lam=self.lam if lam is None else float(lam),
            mu=self.mu if mu is None else float(mu),
            a=self.a if a is None else int(a),
        )


@dataclass(frozen=True)
class FiberMax:
    t_star: float
    value: float
    bracket: tuple
    iterations: int


def fiber_value(c: FiberCoefficients, t: float) -> float:
    ex = c.exps
    return (
        0.5 * (c.E - c.lam * c.P) * t * t
        - c.a * c.V / ex.two_star * t**ex.two_star
        - c.T / ex.two_lower * t**ex.two_lower
        - c.mu * c.Q / c.q * t**c.q
    )


def _validate_q(N: int, q: float) -> float:
    ex = Exponents(N)
    q = float(q)
    if not (2.0 <= q < ex.two_lower):
        raise DomainError(f"q must lie in [2, 2_*) = [2, {ex.two_lower:g}), got {q}")
    return q


@lru_cache(maxsize=None)
def _measure_norms(family: Family, N: int, eps: float, spec: QuadratureSpec):
    ex = Exponents(N)
    tf = TestFunction(family, N, eps=eps)
    E = norm_grad_K(tf, spec)
    P = norm_Lp_K_volume(tf, 2.0, spec)
    V = norm_Lp_K_volume(tf, ex.two_star, spec)
    T = norm_Lp_K_boundary(tf, ex.two_lower, spec)
    return E, P, V, T


@lru_cache(maxsize=None)
def _measure_Q(family: Family, N: int, eps: float, q: float, spec: QuadratureSpec):
    return norm_Lp_K_boundary(TestFunction(family, N, eps=eps), q, spec)


def measure_coefficients(
    family: Family | str,
    N: int,
    eps: float,
    q: float = 2.0,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> FiberCoefficients:
    """The five norms of the chosen family at scale ε.

    a is set to 1 for u/v and 0 for û/v̂; λ = μ = 0 until with_params.
    """
    family = Family(family)
    if family not in _FAMILY_DIMS:
        raise DomainError(f"family {family.value!r} has no fiber")
    ex = Exponents(N)
    need = _FAMILY_DIMS[family]
    if need is not None and ex.N != need:
        raise DomainError(f"family {family.value!r} is only used for N = {need}")
    q = _validate_q(ex.N, q)
    E, P, V, T = _measure_norms(family, ex.N, float(eps), spec)
    Q = _measure_Q(family, ex.N, float(eps), q, spec)
    a = 1 if family in (Family.u_eps, Family.v_eps) else 0
    return FiberCoefficients(ex.N, E, P, V, T, Q, a=a, q=q, family=family.value, eps=float(eps))


def _closed_form_t(c: FiberCoefficients, lin: float) -> float | None:
    """Root of the stationarity equation when μ = 0 (quadratic in t^{2_*-2})."""
    ex = c.exps
    if c.mu != 0.0:
        return None
    if c.a == 1 and c.V > 0:
        s = (-c.T + math.sqrt(c.T * c.T + 4 * c.V * lin)) / (2 * c.V)
    elif c.T > 0:
        s = lin / c.T
    else:
        return None
    return s ** (1.0 / (ex.two_lower - 2))


def maximize_fiber(c: FiberCoefficients, max_iter: int = 200) -> FiberMax:
    """Unique positive maximizer of g via bracketed, safeguarded Newton."""
    ex = c.exps
    lin = c.E - c.lam * c.P
    if not (lin > 0):
        raise GeometryError(f"E - lambda*P = {lin:.6g} <= 0: no mountain-pass shape")
    quad_q = c.q == 2.0
    lin_eff = lin - c.mu * c.Q if quad_q else lin
    if not (lin_eff > 0):
        raise GeometryError(f"E - lambda*P - mu*Q = {lin_eff:.6g} <= 0 for q = 2")
    pa, pb, pq = ex.two_star - 2, ex.two_lower - 2, c.q - 2
    cq = 0.0 if quad_q else c.mu * c.Q
    aV = c.a * c.V
    if aV <= 0 and c.T <= 0 and cq <= 0:
        raise GeometryError("fiber is unbounded above (no negative power term)")

    def h(t):
        # g'(t)/t
        return lin_eff - aV * t**pa - c.T * t**pb - cq * t**pq

    def dh(t):
        out = -aV * pa * t ** (pa - 1) - c.T * pb * t ** (pb - 1)
        if cq:
            out -= cq * pq * t ** (pq - 1)
        return out

    lo, hi = 1e-6, 1.0
    if h(lo) <= 0:
        raise NonConvergence("fiber derivative already negative at t = 1e-6")
    k = 0
    while h(hi) > 0:
        lo = hi
        hi *= 2.0
        k += 1
        if k > 2000:
            raise NonConvergence("could not bracket the fiber maximizer")
    t = _closed_form_t(c, lin) or 0.5 * (lo + hi)
    if not (lo < t < hi):
        t = 0.5 * (lo + hi)
    it = 0
    for it in range(1, max_iter + 1):
        v = h(t)
        if abs(v) <= 1e-12 * lin_eff:
            break
        if v > 0:
            lo = t
        else:
            hi = t
        d = dh(t)
        nt = t - v / d if d < 0 else math.nan
        if not (lo < nt < hi):
            nt = 0.5 * (lo + hi)
        if hi - lo <= 4 * math.ulp(hi):
            t = nt
            break
        t = nt
    else:
        raise NonConvergence("Newton iteration on the fiber did not converge")
    return FiberMax(t, fiber_value(c, t), (lo, hi), it)


@dataclass(frozen=True)
class ConditionRow:
    eps: float
    level: float
    target: float
    passes: bool

    @property
    def margin(self) -> float:
        return self.target - self.level


@dataclass(frozen=True)
class ConditionReport:
    N: int
    a: int
    lam: float
    mu: float
    q: float
    family: str
    form: str  # "level" or "quotient"
    rows: tuple

    @property
    def normalized_margins(self) -> tuple:
        return tuple(r.margin / r.eps**2 for r in self.rows)

    @property
    def trend_widening(self) -> bool:
        """Margin/ε² does not shrink between the two smallest ε."""
        m = self.normalized_margins
        return len(m) >= 2 and m[-1] >= m[-2]

    @property
    def met(self) -> bool:
        tail = self.rows[-2:]
        return len(tail) == 2 and all(r.passes for r in tail) and self.trend_widening


def _sorted_eps(eps_list: Iterable[float]) -> list:
    eps = sorted({float(e) for e in eps_list}, reverse=True)
    if not eps:
        raise DomainError("empty epsilon list")
    return eps


def _measure_all(family, N, eps, q, spec, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda e: measure_coefficients(family, N, e, q, spec), eps))
    return [measure_coefficients(family, N, e, q, spec) for e in eps]


def check_condition_a1(
    N: int,
    lam: float,
    mu: float,
    q: float = 2.0,
    eps_list: Sequence[float] = DEFAULT_CONDITION_EPS,
    spec: QuadratureSpec = DEFAULT_SPEC,
    threads: int = 1,
) -> ConditionReport:
    """sup_t I^1_{λ,μ}(t u_ε) < A at each ε (v_ε when N = 3 and μ = 0)."""
    ex = Exponents(N)
    family = Family.v_eps if (ex.N == 3 and mu == 0) else Family.u_eps
    A = bubble_constants(ex.N, spec).A
    eps = _sorted_eps(eps_list)
    rows = []
    for c in _measure_all(family, ex.N, eps, q, spec, threads):
        fm = maximize_fiber(c.with_params(lam=lam, mu=mu, a=1))
        rows.append(ConditionRow(c.eps, fm.value, A, fm.value < A))
    return ConditionReport(ex.N, 1, float(lam), float(mu), float(q), family.value, "level", tuple(rows))


def check_condition_a0(
    N: int,
    lam: float,
    mu: float,
    q: float = 2.0,
    eps_list: Sequence[float] = DEFAULT_CONDITION_EPS,
    spec: QuadratureSpec = DEFAULT_SPEC,
    threads: int = 1,
) -> ConditionReport:
    """Level bound for a = 0 against S0^{N-1}/(2(N-1)).

    With μ = 0 the level is a power of the quotient (E − λP)/T^{2/2_*};
    for N = 3 that quotient is compared with S0 directly.
    """
    ex = Exponents(N)
    family = Family.vhat_eps if (ex.N == 3 and mu == 0) else Family.uhat_eps
    S0 = trace_constants(ex.N, spec).S0
    quotient_form = ex.N == 3 and mu == 0
    target = S0 if quotient_form else S0 ** (ex.N - 1) / (2 * (ex.N - 1))
    eps = _sorted_eps(eps_list)
    rows = []
    for c in _measure_all(family, ex.N, eps, q, spec, threads):
        c = c.with_params(lam=lam, mu=mu, a=0)
        if mu == 0:
            lin = c.E - lam * c.P
            if not lin > 0:
                raise GeometryError(f"E - lambda*P = {lin:.6g} <= 0")
            quot = lin / c.T ** (2 / ex.two_lower)
            level = quot if quotient_form else quot ** (ex.N - 1) / (2 * (ex.N - 1))
        else:
            level = maximize_fiber(c).value
        rows.append(ConditionRow(c.eps, level, target, level < target))
    form = "quotient" if quotient_form else "level"
    return ConditionReport(ex.N, 0, float(lam), float(mu), float(q), family.value, form, tuple(rows))


def eps2_coefficient_a1(N: int, lam: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """ε² coefficient of sup_t I^1_{λ,0}(t u_ε) − A, for N >= 5."""
    ex = Exponents(N)
    c = expansion_coefficients(ex.N, spec)
    return c.alpha_N / 2 + c.beta_N / ex.two_star + c.gamma_N / ex.two_lower - lam * c.d_N / 2


def eps2_coefficient_a0(N: int, lam: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """ε² coefficient (α̂ − λd̂ + ξ)/B_N of the a = 0 quotient, for N >= 5."""
    c = expansion_coefficients(N, spec)
    B = trace_constants(N, spec).B_N
    return (c.alpha_hat_N - lam * c.d_hat_N + c.xi_N) / B
