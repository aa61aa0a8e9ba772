"""Weight, cutoff, envelope and the bubble test-function families.

All families are cylindrically symmetric, so a profile in (r, x_N) with
r = |x'| is enough. Weighted families are stored through their *carrier*
w = K^{1/2} u, which keeps the weighted integrands free of overflow:

    K |∇u|^2 = |∇w - (x/4) w|^2,     K |u|^p = K^{1-p/2} |w|^p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import expit

from .errors import DomainError
from .numerics import DEFAULT_SPEC, QuadratureSpec, integrate_boundary, integrate_halfspace

__all__ = [
    "Exponents",
    "Family",
    "TestFunction",
    "weight_K",
    "cutoff_profile",
    "cutoff_phi",
    "envelope_psi",
    "interior_bubble",
    "trace_bubble",
    "evaluate",
    "norm_grad_K",
    "norm_Lp_K_volume",
    "norm_Lp_K_boundary",
    "integrate_over",
    "integrate_trace",
    "gaussian",
    "gaussian_polynomial",
    "zero_function",
]

PSI_RATE = 1.0 / (8.0 * math.sqrt(5.0))
MAX_WEIGHTED_EPS = 0.5


@dataclass(frozen=True)
class Exponents:
    N: int
    two_star: float = field(init=False)
    two_lower: float = field(init=False)
    k_N: float = field(init=False)
    x_N0: float = field(init=False)

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 3:
            raise DomainError(f"dimension must be an integer >= 3, got {self.N!r}")
        N = int(self.N)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "two_star", 2.0 * N / (N - 2))
        object.__setattr__(self, "two_lower", 2.0 * (N - 1) / (N - 2))
        object.__setattr__(self, "k_N", math.sqrt(N * (N - 2)) ** ((N - 2) / 2))
        object.__setattr__(self, "x_N0", math.sqrt(N / (N - 2)))

    @property
    def b(self) -> float:
        """b = sqrt(1 + x_N0^2)."""
        return math.sqrt((2.0 * self.N - 2.0) / (self.N - 2.0))


class Family(str, Enum):
    U_EPS = "U"            # bare interior bubble φ_{ε,τ}
    UHAT_BARE = "Uhat"     # bare trace bubble Û_ε
    u_eps = "u"
    v_eps = "v"
    uhat_eps = "uhat"
    vhat_eps = "vhat"
    GAUSSIAN = "gaussian"
    CUSTOM = "custom"


_WEIGHTED_BUBBLES = {Family.u_eps, Family.v_eps, Family.uhat_eps, Family.vhat_eps}

# profile(r, x_N) -> (w, dw/dr, dw/dx_N)
Profile = Callable[[np.ndarray, np.ndarray], tuple]


@dataclass(frozen=True)
class TestFunction:
    """A cylindrically symmetric function on the closed half-space.

    For CUSTOM, ``profile`` returns (w, w_r, w_N); u = K^{-1/2} w when
    ``weighted_carrier`` is true, else u = w. ``support`` (a radius) and
    ``hints`` (length scales) only steer the quadrature.
    """

    __test__ = False  # keep pytest from collecting this class

    family: Family
    N: int
    eps: float = 1.0
    tau: float = 1.0
    profile: Optional[Profile] = None
    weighted_carrier: bool = True
    support: Optional[float] = None
    hints: tuple = ()
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        ex = Exponents(self.N)
        object.__setattr__(self, "N", ex.N)
        if not (self.eps > 0 and math.isfinite(self.eps)):
            raise DomainError(f"eps must be positive, got {self.eps!r}")
        if self.family in _WEIGHTED_BUBBLES and self.eps > MAX_WEIGHTED_EPS:
            raise DomainError(f"weighted families need eps in (0, {MAX_WEIGHTED_EPS}], got {self.eps}")
        if self.tau < 0:
            raise DomainError("tau must be nonnegative")
        if self.family is Family.CUSTOM and self.profile is None:
            raise DomainError("CUSTOM test functions need a profile")
        if self.family in (Family.u_eps, Family.uhat_eps):
            object.__setattr__(self, "support", 2.0)

    @property
    def exps(self) -> Exponents:
        return Exponents(self.N)

    @property
    def carrier_weighted(self) -> bool:
        if self.family is Family.CUSTOM:
            return self.weighted_carrier
        return self.family not in (Family.U_EPS, Family.UHAT_BARE)

    def scale_hints(self) -> tuple:
        e = self.eps
        if self.family is Family.GAUSSIAN:
            return (2.0, 6.0)
        if self.family is Family.CUSTOM:
            return tuple(self.hints)
        pts = [e, 4 * e, 16 * e]
        if self.family in (Family.u_eps, Family.uhat_eps):
            pts += [1.0]
        elif self.family in (Family.v_eps, Family.vhat_eps):
            pts += [1.0, 4.0, 12.0]
        return tuple(sorted(p for p in set(pts) if self.support is None or p < self.support))


def weight_K(r, x_N):
    """K = e^{|x|^2/4} at (|x'|, x_N)."""
    r = np.asarray(r, dtype=float)
    x_N = np.asarray(x_N, dtype=float)
    return np.exp(0.25 * (r * r + x_N * x_N))


def cutoff_profile(rho):
    """Radial cutoff φ(ρ) = s(2 - ρ) and its derivative dφ/dρ.

    s(t) = f(t)/(f(t)+f(1-t)) with f(t) = e^{-1/t}; written as a logistic
    function of 1/t - 1/(1-t) to stay finite near the ends.
    """
    t = 2.0 - np.asarray(rho, dtype=float)
    inside = (t > 0.0) & (t < 1.0)
    tc = np.where(inside, t, 0.5)
    g = 1.0 / tc - 1.0 / (1.0 - tc)
    s = expit(-g)
    ds = s * (1.0 - s) * (1.0 / (tc * tc) + 1.0 / ((1.0 - tc) ** 2))
    s = np.where(inside, s, np.where(t >= 1.0, 1.0, 0.0))
    ds = np.where(inside, ds, 0.0)
    return s, -ds


def cutoff_phi(r, x_N):
    """(φ, ∂φ/∂r, ∂φ/∂x_N) at (|x'|, x_N)."""
    r = np.asarray(r, dtype=float)
    x_N = np.asarray(x_N, dtype=float)
    rho = np.hypot(r, x_N)
    val, d = cutoff_profile(rho)
    safe = np.where(rho > 0, rho, 1.0)
    return val, d * r / safe, d * x_N / safe


def envelope_psi(r, x_N):
    """(ψ, ∂ψ/∂r, ∂ψ/∂x_N) for ψ = e^{-|x|^2/(8√5)}."""
    r = np.asarray(r, dtype=float)
    x_N = np.asarray(x_N, dtype=float)
    val = np.exp(-PSI_RATE * (r * r + x_N * x_N))
    return val, -2 * PSI_RATE * r * val, -2 * PSI_RATE * x_N * val


def interior_bubble(ex: Exponents, eps: float, tau: float, r, x_N):
    """φ_{ε,τ} = k_N (ε/(ε² + r² + (x_N + ετ x_N0)²))^{(N-2)/2} with gradient."""
    s = x_N + eps * tau * ex.x_N0
    D = eps * eps + r * r + s * s
    val = ex.k_N * (eps / D) ** (0.5 * (ex.N - 2))
    c = -(ex.N - 2) * val / D
    return val, c * r, c * s


def trace_bubble(ex: Exponents, eps: float, r, x_N):
    """Û_ε = (ε/(r² + (x_N + ε)²))^{(N-2)/2} with gradient."""
    s = x_N + eps
    D = r * r + s * s
    val = (eps / D) ** (0.5 * (ex.N - 2))
    c = -(ex.N - 2) * val / D
    return val, c * r, c * s


def _carrier(tf: TestFunction, r, x_N):
    fam = tf.family
    ex = tf.exps
    if fam is Family.CUSTOM:
        w, wr, wx = tf.profile(r, x_N)
        return (np.broadcast_to(np.asarray(w, float), np.broadcast(r, x_N).shape),
                np.asarray(wr, float) + 0 * r, np.asarray(wx, float) + 0 * r)
    if fam is Family.GAUSSIAN:
        w = np.exp(-0.125 * (r * r + x_N * x_N))
        return w, -0.25 * r * w, -0.25 * x_N * w
    if fam in (Family.U_EPS, Family.u_eps, Family.v_eps):
        tau = tf.tau if fam is Family.U_EPS else 1.0
        b, br, bx = interior_bubble(ex, tf.eps, tau, r, x_N)
    else:
        b, br, bx = trace_bubble(ex, tf.eps, r, x_N)
    if fam in (Family.U_EPS, Family.UHAT_BARE):
        return b, br, bx
    if fam in (Family.u_eps, Family.uhat_eps):
        c, cr, cx = cutoff_phi(r, x_N)
    else:
        c, cr, cx = envelope_psi(r, x_N)
    return c * b, cr * b + c * br, cx * b + c * bx


def evaluate(tf: TestFunction, r, x_N):
    """Value and exact partials (∂/∂r, ∂/∂x_N) of the test function."""
    r = np.asarray(r, dtype=float)
    x_N = np.asarray(x_N, dtype=float)
    if np.any(r < 0) or np.any(x_N < 0):
        raise DomainError("evaluation points must lie in the closed quadrant r, x_N >= 0")
    w, wr, wx = _carrier(tf, r, x_N)
    if not tf.carrier_weighted:
        return w, wr, wx
    k = np.exp(-0.125 * (r * r + x_N * x_N))
    return k * w, k * (wr - 0.25 * r * w), k * (wx - 0.25 * x_N * w)


def _domain(tf: TestFunction):
    hints = tf.scale_hints()
    if tf.support is None:
        return dict(r_points=hints, x_points=hints)
    R = float(tf.support)

    def r_max(x):
        return np.sqrt(np.maximum(R * R - x * x, 0.0))

    return dict(r_max=r_max, x_max=R, r_points=hints, x_points=hints)


def integrate_over(tf: TestFunction, h, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """∫_{R^N_+} h(r, x_N) dx using the quadrature layout suited to tf."""
    return integrate_halfspace(h, tf.N, spec, **_domain(tf)).value


def integrate_trace(tf: TestFunction, h, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """∫_{R^{N-1}} h(r) dx' using the layout suited to tf."""
    hints = tf.scale_hints()
    r_max = math.inf if tf.support is None else float(tf.support)
    return integrate_boundary(h, tf.N, spec, r_max=r_max, points=hints).value


def _weight_power(tf: TestFunction, weighted: bool, p_carrier: float) -> float:
    # exponent e such that K^{s}|u|^... = K^{e}|carrier-expression|^...
    s = 1.0 if weighted else 0.0
    if not tf.carrier_weighted and weighted:
        raise DomainError(f"weighted norms of the bare family {tf.family.value!r} diverge")
    return s - (0.5 * p_carrier if tf.carrier_weighted else 0.0)


def norm_grad_K(tf: TestFunction, spec: QuadratureSpec = DEFAULT_SPEC, weighted: bool = True) -> float:
    """∫ K|∇u|² over the half-space (plain ∫|∇u|² when weighted=False)."""
    e = _weight_power(tf, weighted, 2.0)
    cw = tf.carrier_weighted

    def h(r, x):
        w, wr, wx = _carrier(tf, r, x)
        if cw:
            wr = wr - 0.25 * r * w
            wx = wx - 0.25 * x * w
        sq = wr * wr + wx * wx
        if e == 0.0:
            return sq
        return sq * np.exp(0.25 * e * (r * r + x * x))

    return integrate_over(tf, h, spec)


def norm_Lp_K_volume(tf: TestFunction, p: float, spec: QuadratureSpec = DEFAULT_SPEC,
                     weighted: bool = True) -> float:
    """∫ K|u|^p over the half-space."""
    if p < 1:
        raise DomainError("p must be >= 1")
    e = _weight_power(tf, weighted, p)

    def h(r, x):
        w, _, _ = _carrier(tf, r, x)
        val = np.abs(w) ** p
        if e == 0.0:
            return val
        return val * np.exp(0.25 * e * (r * r + x * x))

    return integrate_over(tf, h, spec)


def norm_Lp_K_boundary(tf: TestFunction, p: float, spec: QuadratureSpec = DEFAULT_SPEC,
                       weighted: bool = True) -> float:
    """∫ K(x',0)|u(x',0)|^p over the boundary hyperplane."""
    if p < 1:
        raise DomainError("p must be >= 1")
    e = _weight_power(tf, weighted, p)

    def h(r):
        w, _, _ = _carrier(tf, r, np.zeros_like(r))
        val = np.abs(w) ** p
        if e == 0.0:
            return val
        return val * np.exp(0.25 * e * r * r)

    return integrate_trace(tf, h, spec)


def gaussian(N: int) -> TestFunction:
    return TestFunction(Family.GAUSSIAN, N)


def gaussian_polynomial(N: int, coeffs: dict, label: str = "") -> TestFunction:
    """e^{-|x|²/4} Σ c_ij r^{2i} x_N^j as a CUSTOM test function.

    ``coeffs`` maps (i, j) to c_ij.
    """
    items = sorted((int(i), int(j), float(c)) for (i, j), c in coeffs.items())
    if not items:
        raise DomainError("empty polynomial")

    def profile(r, x):
        r = np.asarray(r, dtype=float)
        x = np.asarray(x, dtype=float)
        P = np.zeros(np.broadcast(r, x).shape)
        Pr = np.zeros_like(P)
        Px = np.zeros_like(P)
        for i, j, c in items:
            ri = r ** (2 * i)
            xj = x**j
            P = P + c * ri * xj
            if i:
                Pr = Pr + c * 2 * i * r ** (2 * i - 1) * xj
            if j:
                Px = Px + c * j * ri * x ** (j - 1)
        g = np.exp(-0.125 * (r * r + x * x))
        # carrier w = K^{1/2} u = e^{-|x|²/8} P
        return g * P, g * (Pr - 0.25 * r * P), g * (Px - 0.25 * x * P)

    return TestFunction(Family.CUSTOM, N, profile=profile, weighted_carrier=True,
                        hints=(2.0, 6.0), label=label or "gaussian-poly")


def zero_function(N: int) -> TestFunction:
    def profile(r, x):
        z = np.zeros(np.broadcast(r, x).shape)
        return z, z, z

    return TestFunction(Family.CUSTOM, N, profile=profile, label="zero", hints=(1.0,))
