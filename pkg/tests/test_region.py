import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from halfspace.errors import DomainError, SoundnessError
from halfspace.region import (
    EXISTENCE_CLAUSES,
    NONEXISTENCE_CLAUSES,
    Mu1Bracket,
    ProblemParams,
    Verdict,
    axis_pattern,
    check_axis_pattern,
    classify,
    emit_grid,
    eta_curve,
    grid_axis,
)
from halfspace.thresholds import lambda_bar, lambda_hat

B = Mu1Bracket(0.0, 1.0)


def test_invalid_q():
    with pytest.raises(DomainError):
        ProblemParams(4, 1, 3.0)
    with pytest.raises(DomainError):
        ProblemParams(4, 1, 1.9)
    with pytest.raises(DomainError):
        ProblemParams(7, 0, 2.5)
    with pytest.raises(DomainError):
        ProblemParams(4, 2, 2.0)
    with pytest.raises(DomainError):
        ProblemParams(4, 1, 2.0, lam=math.inf)


def test_bracket_validation():
    with pytest.raises(DomainError):
        Mu1Bracket(1.0, 1.0)
    with pytest.raises(DomainError):
        Mu1Bracket(-0.1, 1.0)


def test_positive_mu_subcritical_q_exists():
    v = classify(ProblemParams(4, 1, 2.5, 1.5, 0.5), B, lambda_bar(4))
    assert v.verdict is Verdict.EXISTS
    assert v.clause == "exists:q>2;mu>0;0<=lambda<N/2"


def test_below_quarter_no_solution():
    v = classify(ProblemParams(5, 1, 2.0, 1.0, 0.0), B, lambda_bar(5))
    assert v.verdict is Verdict.NONE
    assert v.clause == "none:lambda<N/4;mu=0"


def test_a0_n4_above_lambda_hat():
    v = classify(ProblemParams(4, 0, 2.0, 1.5, 0.0), B, lambda_hat(4))
    assert v.verdict is Verdict.EXISTS
    assert v.clause == "exists:mu=0;Lambda*<lambda<N/2"


def test_gap_is_unknown():
    assert 1.3 < lambda_bar(5)
    v = classify(ProblemParams(5, 1, 2.0, 1.3, 0.0), B, lambda_bar(5))
    assert v.verdict is Verdict.UNKNOWN


def test_boundary_of_open_interval_is_unknown():
    L = lambda_bar(5)
    assert classify(ProblemParams(5, 1, 2.0, L, 0.0), B, L).verdict is Verdict.UNKNOWN


def test_negative_lambda_positive_mu_unknown():
    assert classify(ProblemParams(5, 1, 2.2, -0.5, 0.3), B, lambda_bar(5)).verdict is Verdict.UNKNOWN


def test_q2_mu1_one_sided():
    p = ProblemParams(5, 1, 2.0, 1.0)
    br = Mu1Bracket(0.8, 1.5)
    assert classify(p.at(1.0, 0.2), br, lambda_bar(5)).verdict is Verdict.EXISTS  # 0.2 < 0.8 (1 - 0.4)
    assert classify(p.at(1.0, 1.0), br, lambda_bar(5)).verdict is Verdict.UNKNOWN
    v = classify(p.at(1.0, 1.5), br, lambda_bar(5))
    assert v.verdict is Verdict.NONE and v.clause == "none:q=2;lambda>=0;mu>=mu1"


def test_eta_curve():
    assert eta_curve(4, 0.0, 1.3) == 1.3
    assert eta_curve(4, 2.0, 1.3) == 0.0
    assert eta_curve(4, 1.0, 1.3) == pytest.approx(0.65)
    assert eta_curve(4, 3.0, 1.3) < 0
    assert np.allclose(eta_curve(4, np.array([0.0, 2.0]), 1.0), [1.0, 0.0])
    with pytest.raises(DomainError):
        eta_curve(4, 1.0, 0.0)


def test_small_grid():
    rows = emit_grid(ProblemParams(4, 1, 2.5), (0, 2), (0, 1), (3, 3), B, lambda_bar(4))
    assert len(rows) == 9
    assert {r.verdict for r in rows} <= {v.value for v in Verdict}
    assert [(r.lam, r.mu) for r in rows[:3]] == [(0.0, 0.0), (0.0, 0.5), (0.0, 1.0)]
    assert all(r.verdict == "NoPositive" for r in rows if r.lam == 2.0)


def test_grid_threads_agree():
    args = (ProblemParams(5, 1, 2.0), (0, 5), (-1, 1), (26, 21), Mu1Bracket(0.5, 1.6), lambda_bar(5))
    assert emit_grid(*args) == emit_grid(*args, threads=4)


def test_grid_axis_keeps_zero():
    ax = grid_axis(-1.0, 1.0, 41)
    assert ax[20] == 0.0
    with pytest.raises(DomainError):
        grid_axis(0, 1, 1)


@pytest.mark.parametrize("N, a, q", [(4, 1, 2.5), (5, 1, 2.0), (7, 0, 2.2), (3, 0, 3.0), (6, 1, 2.1)])
def test_axis_pattern(N, a, q):
    L = lambda_bar(N) if a else lambda_hat(N)
    rows = emit_grid(ProblemParams(N, a, q), (0.0, float(N)), (-1, 1), (51, 41), Mu1Bracket(0, 1.3), L)
    ok, note = check_axis_pattern(rows, N, L)
    assert ok, note
    runs, _ = axis_pattern(rows)
    assert runs[0] == "NoPositive" and runs[-1] == "NoPositive"


finite = st.floats(-5.0, 10.0)


@st.composite
def problems(draw):
    N = draw(st.integers(3, 12))
    a = draw(st.sampled_from([0, 1]))
    two_lower = 2 * (N - 1) / (N - 2)
    q = draw(st.one_of(st.just(2.0), st.floats(2.0, two_lower, exclude_max=True)))
    lam = draw(st.one_of(finite, st.sampled_from([N / 4, N / 2, 0.0])))
    mu = draw(st.one_of(st.just(0.0), st.floats(-2.0, 3.0)))
    return ProblemParams(N, a, q, lam, mu)


@given(problems(), st.floats(0.0, 2.0), st.floats(0.01, 2.0))
def test_classifier_sound(p, lo, width):
    L = lambda_bar(p.N) if p.a == 1 else lambda_hat(p.N)
    v = classify(p, Mu1Bracket(lo, lo + width), L)
    if v.verdict is Verdict.EXISTS:
        assert p.lam < p.N / 2
    yes = [n for n, f in EXISTENCE_CLAUSES if f(p, Mu1Bracket(lo, lo + width), L)]
    no = [n for n, f in NONEXISTENCE_CLAUSES if f(p, Mu1Bracket(lo, lo + width), L)]
    assert not (yes and no)


@given(problems(), st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.05, 1.0))
def test_shrinking_bracket_never_flips(p, lo, d_lo, d_hi, width):
    """A tighter bracket only turns Unknown into a definite verdict."""
    L = lambda_bar(p.N) if p.a == 1 else lambda_hat(p.N)
    wide = Mu1Bracket(lo, lo + width + d_lo + d_hi)
    narrow = Mu1Bracket(lo + d_lo * 0.999, lo + d_lo + width)
    v_wide = classify(p, wide, L).verdict
    v_narrow = classify(p, narrow, L).verdict
    if v_wide is not Verdict.UNKNOWN:
        assert v_narrow is v_wide


def test_conflict_raises(monkeypatch):
    import halfspace.region as region

    monkeypatch.setattr(region, "EXISTENCE_CLAUSES", (("always", lambda p, m, L: True),))
    with pytest.raises(SoundnessError):
        region.classify(ProblemParams(4, 1, 2.0, 5.0, 0.0), B, 1.0)
