"""Rayleigh quotients, Ritz upper bounds for μ1 and the Hardy-type check."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import DegenerateDenominator, DomainError, IllConditionedGram
from .numerics import DEFAULT_SPEC, QuadratureSpec, gamma_fn, sphere_area
from .testfun import (
    Exponents,
    TestFunction,
    evaluate,
    gaussian_polynomial,
    integrate_over,
    norm_Lp_K_boundary,
    norm_Lp_K_volume,
    norm_grad_K,
)

__all__ = [
    "MAX_CONDITION",
    "RitzBasis",
    "EigenEstimate",
    "HardyResult",
    "rayleigh_volume",
    "rayleigh_boundary",
    "ritz_indices",
    "ritz_basis",
    "ritz_matrices",
    "ritz_values",
    "estimate_mu1",
    "hardy_check",
]

MAX_CONDITION = 1e12


def _quotient(num: float, den: float) -> float:
    if not (den > 0 and math.isfinite(den)):
        raise DegenerateDenominator(f"denominator {den!r} is not positive")
    return num / den


def rayleigh_volume(u: TestFunction, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """‖u‖² / ‖u‖²_{L²_K}; never below N/2 for admissible u."""
    return _quotient(norm_grad_K(u, spec), norm_Lp_K_volume(u, 2.0, spec))


def rayleigh_boundary(u: TestFunction, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """‖u‖² / ‖u‖²_{L²_K(R^{N-1})}; every value bounds μ1 from above."""
    return _quotient(norm_grad_K(u, spec), norm_Lp_K_boundary(u, 2.0, spec))


# ---------------------------------------------------------------------------
# Ritz basis e^{-|x|²/4} r^{2i} x_N^j


def ritz_indices(size: int) -> list:
    """First ``size`` exponent pairs (i, j), by degree i + j, x_N-heavy first.

    Prefixes are nested, so Ritz values are nonincreasing in size.
    """
    if int(size) != size or size < 1:
        raise DomainError("basis size must be a positive integer")
    out = []
    d = 0
    while len(out) < size:
        for j in range(d, -1, -1):
            out.append((d - j, j))
        d += 1
    return out[:size]


@dataclass(frozen=True)
class RitzBasis:
    size: int
    indices: tuple
    elements: tuple


def ritz_basis(N: int, size: int) -> RitzBasis:
    idx = tuple(ritz_indices(size))
    elems = tuple(gaussian_polynomial(N, {ij: 1.0}, label=f"ritz{ij}") for ij in idx)
    return RitzBasis(size, idx, elems)


def _half_moment(k: int) -> float:
    # ∫_0^∞ t^k e^{-t²/4} dt
    return 2.0**k * gamma_fn((k + 1) / 2)


def _moment(N: int, m: int, s: int) -> float:
    # ∫_{R^N_+} r^m x_N^s e^{-|x|²/4} dx
    return sphere_area(N - 1) * _half_moment(N - 2 + m) * _half_moment(s)


def _grad_terms(i: int, j: int):
    # e^{|x|²/4}∇φ for φ = e^{-|x|²/4} r^{2i} x^j, as monomial dicts per component
    gr = defaultdict(float)
    gx = defaultdict(float)
    if i:
        gr[(2 * i - 1, j)] += 2 * i
    gr[(2 * i + 1, j)] += -0.5
    if j:
        gx[(2 * i, j - 1)] += j
    gx[(2 * i, j + 1)] += -0.5
    return gr, gx


def _dot(N: int, p: dict, q: dict) -> float:
    total = 0.0
    for (m1, s1), c1 in sorted(p.items()):
        for (m2, s2), c2 in sorted(q.items()):
            total += c1 * c2 * _moment(N, m1 + m2, s1 + s2)
    return total


@lru_cache(maxsize=None)
def _ritz_matrices_cached(N: int, idx: tuple):
    n = len(idx)
    A = np.zeros((n, n))
    B = np.zeros((n, n))
    grads = [_grad_terms(i, j) for i, j in idx]
    w = sphere_area(N - 1)
    for a in range(n):
        for b in range(a, n):
            ga, gb = grads[a], grads[b]
            A[a, b] = A[b, a] = _dot(N, ga[0], gb[0]) + _dot(N, ga[1], gb[1])
            (ia, ja), (ib, jb) = idx[a], idx[b]
            if ja == 0 and jb == 0:
                B[a, b] = B[b, a] = w * _half_moment(N - 2 + 2 * ia + 2 * ib)
    return A, B


def ritz_matrices(N: int, indices: Sequence) -> tuple:
    """Energy matrix ∫K∇φ_a·∇φ_b and boundary mass ∫K φ_a φ_b (closed form)."""
    Exponents(N)
    A, B = _ritz_matrices_cached(int(N), tuple((int(i), int(j)) for i, j in indices))
    return A.copy(), B.copy()


def ritz_values(N: int, size: int) -> tuple:
    """(μ estimate, eigenvector in the raw basis) for the first ``size`` elements."""
    idx = ritz_indices(size)
    A, B = ritz_matrices(N, idx)
    s = 1.0 / np.sqrt(np.diag(A))
    As = A * s[:, None] * s[None, :]
    Bs = B * s[:, None] * s[None, :]
    cond = np.linalg.cond(As)
    if not cond < MAX_CONDITION:
        raise IllConditionedGram(f"energy Gram condition number {cond:.3e} exceeds {MAX_CONDITION:g}")
    # largest ν in Bv = νAv gives the smallest quotient μ = 1/ν
    nu, vec = scipy.linalg.eigh(Bs, As)
    top = nu[-1]
    if not top > 0:
        raise DegenerateDenominator("no basis element has a nonzero trace")
    return 1.0 / top, vec[:, -1] * s


@dataclass(frozen=True)
class EigenEstimate:
    value: float
    basis_size: int
    history: tuple  # (size, value)


def estimate_mu1(N: int, max_basis_size: int, spec: QuadratureSpec = DEFAULT_SPEC) -> EigenEstimate:
    """Rayleigh-Ritz upper bounds for μ1 over nested Gaussian-polynomial bases.

    The matrices use exact Gaussian moments, so ``spec`` is not consulted.
    """
    if int(max_basis_size) != max_basis_size or max_basis_size < 1:
        raise DomainError("max_basis_size must be a positive integer")
    hist = []
    for k in range(1, int(max_basis_size) + 1):
        mu, _ = ritz_values(N, k)
        if hist and mu > hist[-1][1]:
            # nested subspaces; only rounding can push a value up
            mu = hist[-1][1]
        hist.append((k, mu))
    return EigenEstimate(hist[-1][1], int(max_basis_size), tuple(hist))


# ---------------------------------------------------------------------------
# Hardy-type inequality (N²/4)∫u² <= ∫(x·∇u)², unweighted


@dataclass(frozen=True)
class HardyResult:
    lhs: float
    rhs: float
    holds: bool

    @property
    def ratio(self) -> float:
        return self.rhs / self.lhs if self.lhs else math.inf


def hardy_check(u: TestFunction, spec: QuadratureSpec = DEFAULT_SPEC) -> HardyResult:
    N = u.N

    def mass(r, x):
        v, _, _ = evaluate(u, r, x)
        return v * v

    def radial(r, x):
        _, ur, ux = evaluate(u, r, x)
        d = r * ur + x * ux
        return d * d

    lhs = N * N / 4 * integrate_over(u, mass, spec)
    rhs = integrate_over(u, radial, spec)
    tol = 10 * spec.rel_tol * abs(rhs) + spec.abs_tol
    return HardyResult(lhs, rhs, lhs <= rhs + tol)
