"""ε-independent constants: bubble norms, trace pair, expansion coefficients.

Coefficients with a Beta-function closed form are computed both ways and
both values are kept on the result objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .errors import DomainError
from .numerics import (
    DEFAULT_SPEC,
    QuadratureSpec,
    beta_fn,
    gamma_fn,
    integrate_boundary,
    integrate_halfspace,
    sphere_area,
)
from .testfun import Exponents, Family, TestFunction, norm_Lp_K_boundary, norm_Lp_K_volume, norm_grad_K

__all__ = [
    "N_MAX",
    "BubbleConstants",
    "TraceConstants",
    "ExpansionCoefficients",
    "bubble_constants",
    "trace_constants",
    "expansion_coefficients",
    "xi_N",
    "theta_of_tau",
]

N_MAX = 12


def _check_dim(N: int, lo: int = 3) -> int:
    if int(N) != N or N < lo or N > N_MAX:
        raise DomainError(f"dimension must be an integer in [{lo}, {N_MAX}], got {N!r}")
    return int(N)


@dataclass(frozen=True)
class BubbleConstants:
    N: int
    K1: float
    K2: float
    K3: float
    A: float

    @property
    def identity_residual(self) -> float:
        """(K1 - K2 - K3)/K1; zero in exact arithmetic."""
        return (self.K1 - self.K2 - self.K3) / self.K1

    @property
    def A_alt(self) -> float:
        ex = Exponents(self.N)
        return (0.5 - 1 / ex.two_star) * self.K2 + (0.5 - 1 / ex.two_lower) * self.K3


@dataclass(frozen=True)
class TraceConstants:
    N: int
    A_N: float
    B_N: float
    S0: float


@dataclass(frozen=True)
class ExpansionCoefficients:
    """Expansion coefficients; None where the dimension is out of range."""

    N: int
    b: float
    Gamma0: float
    C1: Optional[float] = None
    C2: Optional[float] = None
    C3: Optional[float] = None
    C4: Optional[float] = None
    C5: Optional[float] = None
    C6: Optional[float] = None
    C3_closed: Optional[float] = None
    C6_closed: Optional[float] = None
    C2_lower: Optional[float] = None
    C4_lower: Optional[float] = None
    D1: Optional[float] = None
    D2: Optional[float] = None
    D3: Optional[float] = None
    D4: Optional[float] = None
    alpha_N: Optional[float] = None
    beta_N: Optional[float] = None
    gamma_N: Optional[float] = None
    d_N: Optional[float] = None
    alpha_hat_N: Optional[float] = None
    d_hat_N: Optional[float] = None
    gamma_hat_N: Optional[float] = None
    alpha_hat_N_closed: Optional[float] = None
    d_hat_N_closed: Optional[float] = None
    gamma_hat_N_closed: Optional[float] = None
    xi_N: Optional[float] = None


def _bare(N: int, family: Family, eps: float = 1.0, tau: float = 1.0) -> TestFunction:
    return TestFunction(family, N, eps=eps, tau=tau)


@lru_cache(maxsize=None)
def _bubble_norms(N: int, eps: float, tau: float, spec: QuadratureSpec):
    ex = Exponents(N)
    tf = _bare(N, Family.U_EPS, eps, tau)
    K1 = norm_grad_K(tf, spec, weighted=False)
    K2 = norm_Lp_K_volume(tf, ex.two_star, spec, weighted=False)
    K3 = norm_Lp_K_boundary(tf, ex.two_lower, spec, weighted=False)
    return K1, K2, K3


def bubble_constants(N: int, spec: QuadratureSpec = DEFAULT_SPEC, eps: float = 1.0) -> BubbleConstants:
    """K1 = ‖∇U‖², K2 = ‖U‖_{2*}^{2*}, K3 = ‖U‖_{2_*}^{2_*} and the level A."""
    N = _check_dim(N)
    ex = Exponents(N)
    K1, K2, K3 = _bubble_norms(N, float(eps), 1.0, spec)
    A = K1 / 2 - K2 / ex.two_star - K3 / ex.two_lower
    return BubbleConstants(N, K1, K2, K3, A)


@lru_cache(maxsize=None)
def _trace_pair(N: int, eps: float, spec: QuadratureSpec):
    ex = Exponents(N)
    tf = _bare(N, Family.UHAT_BARE, eps)
    A_N = norm_grad_K(tf, spec, weighted=False)
    B_N = norm_Lp_K_boundary(tf, ex.two_lower, spec, weighted=False) ** (2 / ex.two_lower)
    return A_N, B_N


def trace_constants(N: int, spec: QuadratureSpec = DEFAULT_SPEC, eps: float = 1.0) -> TraceConstants:
    """A_N = ‖∇Û‖², B_N = ‖Û‖²_{L^{2_*}(boundary)}, S0 = A_N/B_N."""
    N = _check_dim(N)
    A_N, B_N = _trace_pair(N, float(eps), spec)
    return TraceConstants(N, A_N, B_N, A_N / B_N)


def _volume(h, N, spec):
    return integrate_halfspace(h, N, spec, r_points=(1.0, 4.0), x_points=(1.0, 4.0)).value


def _surface(h, N, spec):
    return integrate_boundary(h, N, spec, points=(1.0, 4.0)).value


@lru_cache(maxsize=None)
def expansion_coefficients(N: int, spec: QuadratureSpec = DEFAULT_SPEC) -> ExpansionCoefficients:
    """Quadrature and closed-form values of every coefficient defined at N.

    Raises DomainError for N < 4 (nothing is defined there).
    """
    N = _check_dim(N, lo=4)
    ex = Exponents(N)
    k, x0, b = ex.k_N, ex.x_N0, ex.b
    w = sphere_area(N - 1)
    G0 = gamma_fn((N - 1) / 2)
    out: dict = dict(N=N, b=b, Gamma0=G0)

    def D(r, y):
        return 1.0 + r * r + (y + x0) ** 2

    def Dh(r, y):
        return r * r + (y + 1.0) ** 2

    # N >= 4: boundary integrals
    out["C3"] = _surface(lambda r: r * r / (1.0 + x0 * x0 + r * r) ** (N - 1), N, spec)
    out["C3_closed"] = w / (2 * b ** (N - 3)) * beta_fn((N + 1) / 2, (N - 3) / 2)
    out["D3"] = _surface(lambda r: r * r / (r * r + 1.0) ** (N - 1), N, spec)
    out["gamma_N"] = k**ex.two_lower / (4 * (N - 2)) * out["C3"]
    out["gamma_hat_N"] = out["D3"] / (4 * (N - 2))
    out["gamma_hat_N_closed"] = w / (8 * (N - 2)) * beta_fn((N + 1) / 2, (N - 3) / 2)
    out["C6_closed"] = x0 * w / (2 * (N - 3) * b ** (N - 3)) * beta_fn((N - 1) / 2, (N - 1) / 2)

    if N >= 5:
        C1 = _volume(lambda r, y: (r * r + y * (y + x0)) / D(r, y) ** (N - 1), N, spec)
        C2 = _volume(lambda r, y: (r * r + y * y) / D(r, y) ** N, N, spec)
        C4 = _volume(lambda r, y: 1.0 / D(r, y) ** (N - 2), N, spec)
        C5 = _volume(lambda r, y: 1.0 / D(r, y) ** (N - 1), N, spec)
        C6 = _volume(lambda r, y: x0 * (y + x0) / D(r, y) ** (N - 1), N, spec)
        D1 = _volume(lambda r, y: r * r / Dh(r, y) ** (N - 1), N, spec)
        D2 = _volume(lambda r, y: y * (y + 1.0) / Dh(r, y) ** (N - 1), N, spec)
        D4 = _volume(lambda r, y: 1.0 / Dh(r, y) ** (N - 2), N, spec)
        out.update(C1=C1, C2=C2, C4=C4, C5=C5, C6=C6, D1=D1, D2=D2, D4=D4)
        out["C2_lower"] = w / (2 * (N - 2) * b ** (N - 2)) * beta_fn((N + 1) / 2, (N - 1) / 2)
        out["C4_lower"] = w / (2 * (N - 4) * b ** (N - 4)) * beta_fn((N - 1) / 2, (N - 3) / 2)
        out["alpha_N"] = (N - 2) * k * k / 2 * C1
        out["beta_N"] = k**ex.two_star / (2 * (N - 2)) * C2
        out["d_N"] = k * k * C4
        out["alpha_hat_N"] = (N - 2) / 2 * (D1 + D2)
        out["d_hat_N"] = D4
        out["alpha_hat_N_closed"] = w * (N - 2) / (4 * (N - 4)) * (
            beta_fn((N + 1) / 2, (N - 3) / 2) + beta_fn((N - 1) / 2, (N - 1) / 2) / (N - 3)
        )
        out["d_hat_N_closed"] = w / (2 * (N - 4)) * beta_fn((N - 1) / 2, (N - 3) / 2)
        tc = trace_constants(N, spec)
        out["xi_N"] = (2 / ex.two_lower) * tc.A_N * tc.B_N ** (-ex.two_lower / 2) * out["gamma_hat_N"]
    return ExpansionCoefficients(**out)


def xi_N(N: int, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """ξ_N = (2/2_*) A_N B_N^{-2_*/2} γ̂_N."""
    N = _check_dim(N, lo=5)
    return expansion_coefficients(N, spec).xi_N


def theta_of_tau(N: int, tau: float, spec: QuadratureSpec = DEFAULT_SPEC, eps: float = 1.0) -> float:
    """θ = a/(a + τc) with a = ‖φ_{ε,τ}‖_{2*}^{2*-2}, c = ‖φ_{ε,τ}‖_{2_*}^{2_*-2}."""
    N = _check_dim(N)
    if not (tau >= 0 and math.isfinite(tau)):
        raise DomainError("tau must be a finite nonnegative number")
    if tau == 0:
        return 1.0
    ex = Exponents(N)
    _, K2, K3 = _bubble_norms(N, float(eps), float(tau), spec)
    a = K2 ** ((ex.two_star - 2) / ex.two_star)
    c = K3 ** ((ex.two_lower - 2) / ex.two_lower)
    return a / (a + tau * c)
