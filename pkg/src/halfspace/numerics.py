"""Special functions and deterministic adaptive quadrature.

Everything here works on numpy-vectorized integrands. The adaptive driver
refines many integrals at once (one per "owner"), which keeps the iterated
half-space quadrature down to a few hundred vectorized calls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, NonConvergence

__all__ = [
    "QuadratureSpec",
    "QuadratureResult",
    "DEFAULT_SPEC",
    "gamma_fn",
    "log_gamma",
    "beta_fn",
    "sphere_area",
    "integrate_1d",
    "integrate_halfspace",
    "integrate_boundary",
]


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.abs_tol > 0 and math.isfinite(self.abs_tol)):
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol!r}")
        if not (self.rel_tol > 0 and math.isfinite(self.rel_tol)):
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol!r}")
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be a positive integer")

    def tightened(self, factor: float = 10.0) -> "QuadratureSpec":
        return replace(self, abs_tol=self.abs_tol / factor, rel_tol=self.rel_tol / factor)


DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    subdivisions_used: int

    def __float__(self) -> float:
        return self.value


# ---------------------------------------------------------------------------
# Gamma / Beta

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_sum(x: float) -> float:
    # x is the shifted argument (Gamma(x + 1))
    s = _LANCZOS_C[0]
    for i in range(1, len(_LANCZOS_C)):
        s += _LANCZOS_C[i] / (x + i)
    return s


def _check_positive(name: str, x: float) -> float:
    x = float(x)
    if not (x > 0) or not math.isfinite(x):
        raise DomainError(f"{name} requires a positive finite argument, got {x!r}")
    return x


def log_gamma(x: float) -> float:
    """ln Γ(x) for x > 0."""
    x = _check_positive("log_gamma", x)
    if x < 0.5:
        # reflection: Γ(x)Γ(1-x) = π / sin(πx)
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma(1.0 - x)
    y = x - 1.0
    t = y + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (y + 0.5) * math.log(t) - t + math.log(_lanczos_sum(y))


def gamma_fn(x: float) -> float:
    """Γ(x) for x > 0, relative error around 1e-14 on (0, 50]."""
    x = _check_positive("gamma_fn", x)
    if x == int(x) and x <= 171:
        return float(math.factorial(int(x) - 1))
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    if x > 140:
        return math.exp(log_gamma(x))
    y = x - 1.0
    t = y + _LANCZOS_G + 0.5
    # split the power to stay clear of overflow for large x
    p = t ** (0.5 * (y + 0.5))
    return math.sqrt(2.0 * math.pi) * p * (p * math.exp(-t)) * _lanczos_sum(y)


def beta_fn(a: float, b: float) -> float:
    """B(a, b) = Γ(a)Γ(b)/Γ(a+b)."""
    a = _check_positive("beta_fn", a)
    b = _check_positive("beta_fn", b)
    if a + b < 120:
        return gamma_fn(a) * gamma_fn(b) / gamma_fn(a + b)
    return math.exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b))


def sphere_area(m: int) -> float:
    """Surface area ω_m of the unit sphere in R^m."""
    if int(m) != m or m < 1:
        raise DomainError(f"sphere_area needs an integer m >= 1, got {m!r}")
    return 2.0 * math.pi ** (0.5 * m) / gamma_fn(0.5 * m)


# ---------------------------------------------------------------------------
# Gauss-Kronrod 10/21 rule (QUADPACK qk21 nodes)

_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525741759,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GIDX = np.array([1, 3, 5, 7, 9, 19, 17, 15, 13, 11])
_WGFULL = np.concatenate([_WG, _WG])
_EPS = np.finfo(float).eps
_UFLOW = np.finfo(float).tiny

# f(x, owner) -> array of the same shape as x; owner has shape (P,) and x (P, 21)
BatchIntegrand = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _apply_rule(f: BatchIntegrand, a: np.ndarray, b: np.ndarray, owner: np.ndarray):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    x = c[:, None] + h[:, None] * _NODES[None, :]
    fx = np.asarray(f(x, owner), dtype=float)
    if fx.shape != x.shape:
        fx = np.broadcast_to(fx, x.shape)
    if not np.all(np.isfinite(fx)):
        raise NonConvergence("integrand returned a non-finite value")
    kron = fx @ _WK
    gauss = fx[:, _GIDX] @ _WGFULL
    ah = np.abs(h)
    resabs = (np.abs(fx) @ _WK) * ah
    resasc = (np.abs(fx - 0.5 * kron[:, None]) @ _WK) * ah
    err = np.abs(kron - gauss) * ah
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc > 0) & (err > 0), scaled, err)
    floor = 50.0 * _EPS * resabs
    err = np.where(resabs > _UFLOW / (50.0 * _EPS), np.maximum(err, floor), err)
    return kron * h, err


def _adaptive(f: BatchIntegrand, a, b, owner, n: int, spec: QuadratureSpec):
    """Refine n integrals simultaneously.

    Returns (values, errors, panel_counts), one entry per owner.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    owner = np.asarray(owner, dtype=np.intp)
    val, err = _apply_rule(f, a, b, owner)
    while True:
        total = np.bincount(owner, weights=val, minlength=n)
        terr = np.bincount(owner, weights=err, minlength=n)
        counts = np.bincount(owner, minlength=n)
        tol = np.maximum(spec.abs_tol, spec.rel_tol * np.abs(total))
        bad = terr > tol
        if not bad.any():
            return total, terr, counts
        if np.any(counts[bad] >= spec.max_subdivisions):
            raise NonConvergence(
                f"max_subdivisions={spec.max_subdivisions} exhausted "
                f"(error {terr[bad].max():.3e} > tol {tol[bad].min():.3e})",
                partial=QuadratureResult(float(total[0]), float(terr[0]), int(counts[0])),
            )
        worst = np.zeros(n)
        np.maximum.at(worst, owner, err)
        thresh = np.minimum(tol / np.maximum(counts, 1), worst)
        sel = bad[owner] & (err >= thresh[owner])
        # never step past the subdivision budget
        new_counts = counts + np.bincount(owner[sel], minlength=n)
        over = new_counts > spec.max_subdivisions
        if over.any():
            keep_sel = sel & ~over[owner]
            worst_only = sel & over[owner] & (err >= worst[owner])
            sel = keep_sel | worst_only
        keep = ~sel
        sa, sb, so = a[sel], b[sel], owner[sel]
        mid = 0.5 * (sa + sb)
        na = np.concatenate([sa, mid])
        nb = np.concatenate([mid, sb])
        no = np.concatenate([so, so])
        nv, ne = _apply_rule(f, na, nb, no)
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        owner = np.concatenate([owner[keep], no])
        val = np.concatenate([val[keep], nv])
        err = np.concatenate([err[keep], ne])


def _to_unit(p, lo):
    d = np.asarray(p, dtype=float) - lo
    return d / (1.0 + d)


def _breaks(lo: float, hi: float, points: Sequence[float]) -> np.ndarray:
    pts = sorted({float(p) for p in points if lo < p < hi})
    return np.array([lo] + pts + [hi], dtype=float)


def integrate_1d(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    points: Sequence[float] = (),
) -> QuadratureResult:
    """Adaptive Gauss-Kronrod quadrature of a vectorized f over (lo, hi).

    ``hi`` may be +inf; then r = lo + t/(1-t) maps the range onto (0, 1).
    ``points`` are optional interior breakpoints (scale hints).
    """
    lo = float(lo)
    hi = float(hi)
    if not math.isfinite(lo):
        raise DomainError("lower limit must be finite")
    if hi == lo:
        return QuadratureResult(0.0, 0.0, 0)
    if hi < lo:
        r = integrate_1d(f, hi, lo, spec, points)
        return QuadratureResult(-r.value, r.error_estimate, r.subdivisions_used)
    brk = _breaks(lo, hi, points)
    if math.isinf(hi):
        tb = _to_unit(brk[:-1], lo)
        tb = np.append(tb, 1.0)

        def g(t, _owner):
            s = 1.0 - t
            return f(lo + t / s) / (s * s)
    else:
        tb = brk

        def g(x, _owner):
            return f(x)

    owner = np.zeros(len(tb) - 1, dtype=np.intp)
    val, err, cnt = _adaptive(g, tb[:-1], tb[1:], owner, 1, spec)
    return QuadratureResult(float(val[0]), float(err[0]), int(cnt[0]))


def integrate_boundary(
    h: Callable[[np.ndarray], np.ndarray],
    N: int,
    spec: QuadratureSpec = DEFAULT_SPEC,
    r_max: float = math.inf,
    points: Sequence[float] = (),
) -> QuadratureResult:
    """∫_{R^{N-1}} h(|x'|) dx' = ω_{N-1} ∫_0^∞ r^{N-2} h(r) dr."""
    if N < 2:
        raise DomainError("boundary integrals need N >= 2")
    w = sphere_area(N - 1)
    m = N - 2
    res = integrate_1d(lambda r: r**m * h(r), 0.0, r_max, spec, points)
    return QuadratureResult(w * res.value, w * res.error_estimate, res.subdivisions_used)


def _inner_integrals(h, m, xs, spec, r_max, r_points):
    """∫_0^{r_max(x)} r^m h(r, x) dr for every x in the flat array xs."""
    M = xs.size
    if callable(r_max):
        rmax = np.broadcast_to(np.asarray(r_max(xs), dtype=float), xs.shape).copy()
    else:
        rmax = np.full(M, float(r_max))
    infinite = np.isinf(rmax)
    pts = np.array(sorted({float(p) for p in r_points if p > 0}), dtype=float)
    # per-owner breakpoints: 0, hints (clipped), rmax; in t-space where infinite
    grid = np.empty((M, pts.size + 2))
    grid[:, 0] = 0.0
    if pts.size:
        clipped = np.minimum(pts[None, :], np.where(infinite, np.inf, rmax)[:, None])
        grid[:, 1:-1] = np.where(infinite[:, None], clipped / (1.0 + clipped), clipped)
    grid[:, -1] = np.where(infinite, 1.0, rmax)
    a = grid[:, :-1].ravel()
    b = grid[:, 1:].ravel()
    owner = np.repeat(np.arange(M), pts.size + 1)
    nz = b > a
    a, b, owner = a[nz], b[nz], owner[nz]
    if a.size == 0:
        return np.zeros(M)

    def g(t, o):
        xo = xs[o][:, None]
        inf_o = infinite[o][:, None]
        s = np.where(inf_o, 1.0 - t, 1.0)
        r = np.where(inf_o, t / s, t)
        jac = np.where(inf_o, 1.0 / (s * s), 1.0)
        return h(r, xo) * r**m * jac

    val, _err, _cnt = _adaptive(g, a, b, owner, M, spec)
    return val


def integrate_halfspace(
    h: Callable[[np.ndarray, np.ndarray], np.ndarray],
    N: int,
    spec: QuadratureSpec = DEFAULT_SPEC,
    *,
    r_max: float | Callable[[np.ndarray], np.ndarray] = math.inf,
    x_max: float = math.inf,
    r_points: Sequence[float] = (),
    x_points: Sequence[float] = (),
) -> QuadratureResult:
    """∫_{R^N_+} h(|x'|, x_N) dx by iterated quadrature in (r, x_N).

    The inner r-integral runs at 10x tighter tolerance. ``r_max`` may depend
    on x_N (for compactly supported profiles).
    """
    if N < 2:
        raise DomainError("half-space integrals need N >= 2")
    inner_spec = spec.tightened(10.0)
    m = N - 2

    def outer(xs):
        flat = np.ascontiguousarray(xs, dtype=float).ravel()
        return _inner_integrals(h, m, flat, inner_spec, r_max, r_points).reshape(np.shape(xs))

    res = integrate_1d(outer, 0.0, x_max, spec, x_points)
    w = sphere_area(N - 1)
    return QuadratureResult(w * res.value, w * res.error_estimate, res.subdivisions_used)
