import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from halfspace.asymptotics import (
    DEFAULT_GRID,
    TOLERANCES,
    ExpansionModel,
    ModelKind,
    analyze,
    fit,
    envelope_J,
    predicted_model,
    sweep,
    verify_envelope_bounds,
)
from halfspace.constants import bubble_constants, expansion_coefficients
from halfspace.errors import DomainError, SingularFit

GRID = np.array(DEFAULT_GRID)
real = st.floats(-50.0, 50.0)


@given(c0=real, c2=real, c3=real)
def test_eps2_model_recovers_synthetic(c0, c2, c3):
    data = list(zip(GRID, c0 + c2 * GRID**2 + c3 * GRID**3))
    f = fit(data, ExpansionModel(ModelKind.C0_plus_C2_eps2, companions=(3.0,)))
    assert f.fitted == pytest.approx(c2, abs=1e-6 * (1 + abs(c0) + abs(c2) + abs(c3)))


@given(c=real, c2=real)
def test_log_model_recovers_synthetic(c, c2):
    L = GRID**2 * np.abs(np.log(GRID))
    data = list(zip(GRID, 1.5 + c * L + c2 * GRID**2))
    f = fit(data, ExpansionModel(ModelKind.C0_plus_Clog, c0=1.5, predicted=c if c else None))
    assert f.fitted == pytest.approx(c, abs=1e-8 * (1 + abs(c) + abs(c2)))


@given(theta=st.floats(0.1, 3.0), k=st.floats(0.1, 10.0))
def test_power_model_recovers_exponent(theta, k):
    data = list(zip(GRID, k * GRID**theta))
    f = fit(data, ExpansionModel(ModelKind.PurePower, theta=theta))
    assert f.fitted == pytest.approx(theta, rel=1e-10)
    assert f.rel_dev == pytest.approx(0.0, abs=1e-9)


def test_powerlog_model():
    data = list(zip(GRID, 2.0 * GRID * np.abs(np.log(GRID)) - 0.5 * GRID))
    f = fit(data, ExpansionModel(ModelKind.PowerLog))
    assert f.coefficients == pytest.approx((2.0, -0.5))
    assert f.predicted is None and f.rel_dev is None


def test_fit_errors():
    m = ExpansionModel(ModelKind.C0_plus_C2_eps2)
    with pytest.raises(DomainError):
        fit([(0.1, 1.0), (0.05, 2.0)], m)
    with pytest.raises(DomainError):
        fit([(0.1, 1.0), (0.1, 2.0), (0.05, 3.0)], m)
    with pytest.raises(SingularFit):
        fit(list(zip(GRID, GRID**2)), ExpansionModel(ModelKind.C0_plus_C2_eps2, companions=(2.0,)))
    with pytest.raises(SingularFit):
        fit(list(zip(GRID[:3], GRID[:3])), ExpansionModel(ModelKind.C0_plus_C2_eps2, companions=(3.0, 4.0)))
    with pytest.raises(DomainError):
        fit([(0.5, 1.0), (0.3, 2.0), (0.1, 3.0)], ExpansionModel(ModelKind.C0_plus_Clog))
    with pytest.raises(DomainError):
        sweep("E", "u", 5, eps_grid=(0.3, 0.1, 0.05))


def test_sweep_sorted_and_positive():
    data = sweep("P", "u", 5)
    assert [e for e, _ in data] == sorted(DEFAULT_GRID, reverse=True)
    assert all(v > 0 for _, v in data)


@pytest.mark.parametrize("quantity, attr, sign", [("E", "alpha_N", 1), ("P", "d_N", 1), ("V", "beta_N", -1),
                                                  ("T", "gamma_N", -1)])
def test_n5_u_coefficients(quantity, attr, sign):
    f, tol = analyze(quantity, "u", 5)
    assert tol == TOLERANCES["eps2"]
    assert f.predicted == pytest.approx(sign * getattr(expansion_coefficients(5), attr))
    assert f.rel_dev <= tol


@pytest.mark.parametrize("quantity", ["E", "P"])
def test_n4_log_coefficient(quantity):
    f, tol = analyze(quantity, "u", 4)
    assert f.predicted == pytest.approx(8 * math.pi**2)
    assert f.rel_dev <= tol


@pytest.mark.parametrize("N, q", [(4, 2.5), (3, 3.0), (5, 2.5), (4, 2.0)])
def test_boundary_power_slope(N, q):
    f, tol = analyze("Q", "u", N, q)
    assert f.predicted == pytest.approx(N - 1 - (N - 2) * q / 2)
    assert f.rel_dev <= tol


@pytest.mark.parametrize("N, family, quantity", [(6, "u", "E"), (7, "u", "V"), (5, "uhat", "E"), (7, "uhat", "P"),
                                                 (4, "uhat", "E"), (5, "uhat", "T")])
def test_other_predicted_coefficients(N, family, quantity):
    f, tol = analyze(quantity, family, N)
    assert f.rel_dev <= tol


def test_models_without_prediction():
    model, key = predicted_model("E", "v", 3)
    assert model.kind is ModelKind.PowerLog and key is None
    model, key = predicted_model("V", "u", 4)
    assert key is None
    assert model.c0 == pytest.approx(bubble_constants(4).K2)


def test_j_closed_form():
    # J = π √(4√5 π) for the Gaussian envelope e^{-|x|²/(8√5)}
    assert envelope_J() == pytest.approx(math.pi * math.sqrt(4 * math.sqrt(5) * math.pi), rel=1e-9)


def test_envelope_family_bounds():
    rep = verify_envelope_bounds()
    assert rep.upper_holds
    assert rep.lower_holds
    assert rep.d1 > 0 and rep.d2 >= rep.d2_fit
