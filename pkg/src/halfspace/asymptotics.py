"""ε-sweeps of the fiber norms and least-squares extraction of coefficients.

Every model carries explicit remainder ("companion") terms. Without them
the leading coefficients are visibly biased on reachable grids: the cutoff
leaves an ε^{N-2} term, the expansions continue at ε⁴, and boundary powers
pick up relative O(ε) corrections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .constants import bubble_constants, expansion_coefficients, trace_constants
from .errors import DomainError, SingularFit
from .fiber import measure_coefficients
from .numerics import DEFAULT_SPEC, QuadratureSpec, integrate_halfspace, sphere_area
from .testfun import PSI_RATE, Exponents, Family

__all__ = [
    "DEFAULT_GRID",
    "Quantity",
    "ModelKind",
    "ExpansionModel",
    "ExpansionFit",
    "sweep",
    "fit",
    "predicted_model",
    "analyze",
    "TOLERANCES",
    "envelope_J",
    "EnvelopeBoundReport",
    "verify_envelope_bounds",
]

DEFAULT_GRID = (0.15, 0.1, 0.07, 0.05, 0.035, 0.025)
MAX_SWEEP_EPS = 0.2
LOG_MODEL_MAX_EPS = 0.2


class Quantity(str, Enum):
    E = "E"
    P = "P"
    V = "V"
    T = "T"
    Q = "Q"


class ModelKind(str, Enum):
    C0_plus_C2_eps2 = "C0_plus_C2_eps2"  # c0 + c2 ε²
    C0_plus_Clog = "C0_plus_Clog"        # c0 + c ε²|ln ε| + c' ε²
    PurePower = "PurePower"              # c ε^θ, fitted in log-log form
    PowerLog = "PowerLog"                # c ε|ln ε| + c' ε


@dataclass(frozen=True)
class ExpansionModel:
    """A regression model for y(ε).

    c0 fixes the constant term (None: fit it; PurePower/PowerLog ignore it).
    companions are extra powers of ε fitted as remainder terms; for
    PurePower they enter as corrections to log y.
    """

    kind: ModelKind
    predicted: Optional[float] = None
    theta: Optional[float] = None
    c0: Optional[float] = None
    companions: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        object.__setattr__(self, "companions", tuple(float(p) for p in self.companions))


@dataclass(frozen=True)
class ExpansionFit:
    fitted: float
    predicted: Optional[float]
    rel_dev: Optional[float]
    residual_norm: float
    eps_used: tuple
    coefficients: tuple = field(default=())
    model: Optional[ExpansionModel] = None


TOLERANCES = {"eps2": 0.05, "log": 0.10, "power": 0.03}


def sweep(
    quantity: Quantity | str,
    family: Family | str,
    N: int,
    q: float = 2.0,
    eps_grid: Sequence[float] = DEFAULT_GRID,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> list:
    """Measured (ε, value) pairs, sorted by decreasing ε."""
    quantity = Quantity(quantity)
    grid = sorted({float(e) for e in eps_grid}, reverse=True)
    if not grid or grid[0] > MAX_SWEEP_EPS or grid[-1] <= 0:
        raise DomainError(f"sweep grid must lie in (0, {MAX_SWEEP_EPS}]")
    out = []
    for e in grid:
        c = measure_coefficients(family, N, e, q, spec)
        out.append((e, float(getattr(c, quantity.value))))
    return out


def _design(kind: ModelKind, eps: np.ndarray, c0_free: bool, companions):
    cols = []
    if kind is ModelKind.C0_plus_C2_eps2:
        if c0_free:
            cols.append(np.ones_like(eps))
        cols.append(eps**2)
        lead = len(cols) - 1
    elif kind is ModelKind.C0_plus_Clog:
        if c0_free:
            cols.append(np.ones_like(eps))
        cols.append(eps**2 * np.abs(np.log(eps)))
        lead = len(cols) - 1
        cols.append(eps**2)
    elif kind is ModelKind.PurePower:
        cols += [np.ones_like(eps), np.log(eps)]
        lead = 1
    else:
        cols += [eps * np.abs(np.log(eps)), eps]
        lead = 0
    for p in companions:
        cols.append(eps**p)
    return np.column_stack(cols), lead


def fit(data: Sequence, model: ExpansionModel) -> ExpansionFit:
    """Linear least squares of the model on (ε, y) data.

    ``fitted`` is the leading coefficient (the exponent θ for PurePower).
    """
    pts = sorted(((float(e), float(y)) for e, y in data), key=lambda p: -p[0])
    if len(pts) < 3:
        raise DomainError("fit needs at least 3 data points")
    eps = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if np.any(np.diff(eps) >= 0) or eps[-1] <= 0:
        raise DomainError("epsilon grid must be strictly decreasing and positive")
    kind = model.kind
    if kind in (ModelKind.C0_plus_Clog, ModelKind.PowerLog) and eps[0] > LOG_MODEL_MAX_EPS:
        raise DomainError(f"log models need eps <= {LOG_MODEL_MAX_EPS}")
    c0_free = model.c0 is None
    rhs = y.copy()
    if kind is ModelKind.PurePower:
        if np.any(y <= 0):
            raise DomainError("PurePower needs positive data")
        rhs = np.log(y)
    elif kind in (ModelKind.C0_plus_C2_eps2, ModelKind.C0_plus_Clog) and not c0_free:
        rhs = y - model.c0
    A, lead = _design(kind, eps, c0_free, model.companions)
    if A.shape[1] > A.shape[0]:
        raise SingularFit(f"{A.shape[1]} parameters but only {A.shape[0]} points")
    scale = np.linalg.norm(A, axis=0)
    if np.any(scale == 0):
        raise SingularFit("a basis column vanishes on this grid")
    As = A / scale
    sv = np.linalg.svd(As, compute_uv=False)
    if sv[-1] <= 1e-12 * sv[0]:
        raise SingularFit(f"basis is numerically rank deficient (cond {sv[0] / max(sv[-1], 1e-300):.3e})")
    coef, *_ = np.linalg.lstsq(As, rhs, rcond=None)
    coef = coef / scale
    resid = float(np.linalg.norm(A @ coef - rhs))
    fitted = float(coef[lead])
    predicted = model.predicted
    if predicted is None and kind is ModelKind.PurePower:
        predicted = model.theta
    rel = None if predicted is None else abs(fitted - predicted) / abs(predicted)
    return ExpansionFit(fitted, predicted, rel, resid, tuple(eps.tolist()), tuple(coef.tolist()), model)


def _eps2_companions(N: int) -> tuple:
    return tuple(sorted({float(N - 2), 4.0} - {2.0}))


def predicted_model(
    quantity: Quantity | str,
    family: Family | str,
    N: int,
    q: float = 2.0,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> tuple:
    """(model, tolerance key) encoding the predicted behavior of a quantity.

    The tolerance key is None when no coefficient is predicted.
    """
    quantity = Quantity(quantity)
    family = Family(family)
    ex = Exponents(N)
    N = ex.N
    hat = family in (Family.uhat_eps, Family.vhat_eps)
    if quantity is Quantity.Q:
        theta = N - 1 - (N - 2) * q / 2
        if N == 3 and q == 2.0:
            return ExpansionModel(ModelKind.PowerLog), None
        return ExpansionModel(ModelKind.PurePower, theta=theta, companions=(1.0, 2.0)), "power"
    if N == 3:
        # only orders are known: O(ε) and O(ε²|ln ε|)
        return ExpansionModel(ModelKind.PowerLog), None
    if hat:
        tc = trace_constants(N, spec)
        c0 = {Quantity.E: tc.A_N, Quantity.P: 0.0, Quantity.T: tc.B_N ** (ex.two_lower / 2), Quantity.V: None}[quantity]
    else:
        bc = bubble_constants(N, spec)
        c0 = {Quantity.E: bc.K1, Quantity.P: 0.0, Quantity.V: bc.K2, Quantity.T: bc.K3}[quantity]
    if N == 4 and quantity in (Quantity.E, Quantity.P):
        w4 = sphere_area(4)
        pred = w4 / 2 if hat else ex.k_N**2 * w4 / 2
        return ExpansionModel(ModelKind.C0_plus_Clog, predicted=pred, c0=c0, companions=(3.0,)), "log"
    comp = _eps2_companions(N)
    if quantity is Quantity.T:
        ec = expansion_coefficients(N, spec)
        pred = -(ec.gamma_hat_N if hat else ec.gamma_N)
        return ExpansionModel(ModelKind.C0_plus_C2_eps2, predicted=pred, c0=c0, companions=comp), "eps2"
    if N == 4:
        return ExpansionModel(ModelKind.C0_plus_C2_eps2, c0=c0, companions=comp), None
    ec = expansion_coefficients(N, spec)
    if hat:
        pred = {Quantity.E: ec.alpha_hat_N, Quantity.P: ec.d_hat_N, Quantity.V: None}[quantity]
    else:
        pred = {Quantity.E: ec.alpha_N, Quantity.P: ec.d_N, Quantity.V: -ec.beta_N}[quantity]
    key = None if pred is None else "eps2"
    return ExpansionModel(ModelKind.C0_plus_C2_eps2, predicted=pred, c0=c0, companions=comp), key


def analyze(
    quantity: Quantity | str,
    family: Family | str,
    N: int,
    q: float = 2.0,
    eps_grid: Sequence[float] = DEFAULT_GRID,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> tuple:
    """Sweep + fit against the predicted model. Returns (fit, tolerance or None)."""
    data = sweep(quantity, family, N, q, eps_grid, spec)
    model, key = predicted_model(quantity, family, N, q, spec)
    return fit(data, model), (None if key is None else TOLERANCES[key])


def envelope_J(spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """J = ∫_{R³_+} ψ²/|x|² dx."""

    def h(r, x):
        rho2 = r * r + x * x
        return np.exp(-2 * PSI_RATE * rho2) / rho2

    return integrate_halfspace(h, 3, spec, r_points=(1.0, 4.0), x_points=(1.0, 4.0)).value


@dataclass(frozen=True)
class EnvelopeBoundReport:
    J: float
    K1: float
    rows: tuple  # (eps, E, upper_bound, upper_holds, P, lower_bound, lower_holds)
    d1: float
    d2: float
    d2_fit: float
    residual_norm: float

    @property
    def upper_holds(self) -> bool:
        return all(r[3] for r in self.rows)

    @property
    def lower_holds(self) -> bool:
        return self.d1 > 0 and self.d2 > 0 and all(r[6] for r in self.rows)


def verify_envelope_bounds(eps_list: Sequence[float] = DEFAULT_GRID, spec: QuadratureSpec = DEFAULT_SPEC) -> EnvelopeBoundReport:
    """Two-sided bounds for the N = 3 envelope family v_ε.

    Upper: E < K1 + ((3+√5)√3/4) ε J.
    Lower: P > √3 ε J − d1 ε²|ln ε| − d2 ε². d1 and d2 come from a
    least-squares fit of the deficit √3 ε J − P; d2 is then raised to the
    smallest value for which the bound holds on the whole grid.
    """
    eps = sorted({float(e) for e in eps_list}, reverse=True)
    if len(eps) < 3 or eps[0] > MAX_SWEEP_EPS:
        raise DomainError(f"need >= 3 eps values in (0, {MAX_SWEEP_EPS}]")
    J = envelope_J(spec)
    K1 = bubble_constants(3, spec).K1
    c_up = (3 + math.sqrt(5)) * math.sqrt(3) / 4
    meas = [measure_coefficients(Family.v_eps, 3, e, 2.0, spec) for e in eps]
    e_arr = np.array(eps)
    deficit = np.array([math.sqrt(3) * e * J - m.P for e, m in zip(eps, meas)])
    L = e_arr**2 * np.abs(np.log(e_arr))
    A = np.column_stack([L, e_arr**2])
    coef, *_ = np.linalg.lstsq(A, deficit, rcond=None)
    d1, d2_fit = float(coef[0]), float(coef[1])
    resid = float(np.linalg.norm(A @ coef - deficit))
    d2 = max(d2_fit, float(np.max((deficit - d1 * L) / e_arr**2))) * (1 + 1e-9)
    rows = []
    for e, m in zip(eps, meas):
        up = K1 + c_up * e * J
        lo = math.sqrt(3) * e * J - d1 * e * e * abs(math.log(e)) - d2 * e * e
        rows.append((e, m.E, up, m.E < up, m.P, lo, m.P >= lo))
    return EnvelopeBoundReport(J, K1, tuple(rows), d1, d2, d2_fit, resid)
