import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf, pi

from charexp import (
    EquationParams,
    InvalidParametersError,
    LambdaDegenerateError,
    choose_lambda,
    derive_frame,
)

box_reals = st.floats(min_value=-4, max_value=4, allow_nan=False)


def params_from(D, L, B):
    return EquationParams(D=D, L=L, B=B)


def test_simple_cubic_frame():
    # B6 = 9 only: p3 = 1, everything else collapses, tau = 3/2, mu = -1/2
    p = params_from([0] * 6, 0, [0, 0, 0, 0, 0, 9])
    fr = derive_frame(p, 0)
    assert fr.p3 == 1 and fr.p2 == 0 and fr.p1 == 0
    assert fr.s0 == fr.p3 and fr.t10 == fr.p2 and fr.t20 == fr.p1
    assert abs(fr.tau_plus - mpf(3) / 2) < mpf("1e-70")
    assert abs(fr.tau_minus - mpf(3) / 2) < mpf("1e-70")
    assert abs(fr.mu_plus + mpf(1) / 2) < mpf("1e-70")
    assert abs(fr.mu_minus + mpf(1) / 2) < mpf("1e-70")


def test_cancelling_tau_terms():
    # B3/6 and 2 p1 p2 / 3 cancel: tau(+-1) = 3/2 despite nonzero B3, B4, B5
    p = params_from([0] * 6, 0, [0, 0, 4, 10, 12, 9])
    fr = derive_frame(p, 0)
    assert fr.p3 == 1 and fr.p2 == 1 and fr.p1 == 1
    assert abs(fr.tau_plus - mpf(3) / 2) < mpf("1e-70")
    assert abs(fr.tau_minus - mpf(3) / 2) < mpf("1e-70")


@settings(max_examples=25, deadline=None)
@given(
    D=st.lists(box_reals, min_size=6, max_size=6),
    L=st.floats(min_value=0, max_value=2),
    B5=st.lists(box_reals, min_size=5, max_size=5),
    B6=st.floats(min_value=1, max_value=16),
    lam=st.floats(min_value=-2, max_value=2),
)
def test_frame_invariants(D, L, B5, B6, lam):
    p = params_from(D, L, B5 + [B6])
    try:
        fr = derive_frame(p, lam)
    except LambdaDegenerateError:
        return
    ulp4 = mpf(2) ** (4 - mp.prec) * 4
    assert abs(fr.tau_plus + fr.tau_minus - 3) <= ulp4
    eps = mpf(2) ** (8 - mp.prec)
    for kappa in (1, -1):
        assert abs(3 * fr.mu(kappa) - fr.lam - fr.tau(kappa) + 3) < eps


def test_derive_frame_deterministic():
    p = params_from([0.3, -1, 2, 0, 1.5, -0.25], 0.7, [1, 2, 3, -1, 0.5, 5])
    f1 = derive_frame(p, 0.7)
    f2 = derive_frame(p, 0.7)
    for name in ("p1", "p2", "p3", "tau_plus", "tau_minus", "mu_plus", "mu_minus"):
        assert getattr(f1, name) == getattr(f2, name)


def test_b6_must_be_positive():
    with pytest.raises(InvalidParametersError):
        params_from([0] * 6, 0, [0, 0, 0, 0, 0, -1])
    with pytest.raises(InvalidParametersError):
        params_from([0] * 6, 0, [0, 0, 0, 0, 0, 0])


def test_l_must_be_nonnegative():
    with pytest.raises(InvalidParametersError):
        params_from([0] * 6, -0.5, [0, 0, 0, 0, 0, 9])


def test_integer_mu_rejected():
    # B3 = -9 with B6 = 9 makes tau(1) = 3, so mu(1) = 0 at lambda = 0
    p = params_from([0] * 6, 0, [0, 0, -9, 0, 0, 9])
    with pytest.raises(LambdaDegenerateError):
        derive_frame(p, 0)


def test_choose_lambda_default_is_L():
    p = params_from([0] * 6, 2, [0, 0, 0, 0, 0, 9])
    assert choose_lambda(p) == 2


def test_choose_lambda_shifts_off_integer_mu():
    p = params_from([0] * 6, 0, [0, 0, -9, 0, 0, 9])
    lam = choose_lambda(p)
    assert abs(lam - 1 / pi) < mpf("1e-70")
    fr = derive_frame(p, lam)  # must not raise
    assert fr.lam == lam


def test_choose_lambda_simple_case():
    p = params_from([0] * 6, 0, [0, 0, 0, 0, 0, 9])
    lam = choose_lambda(p)
    assert lam == 0
    fr = derive_frame(p, lam)
    assert abs(fr.mu_plus + mpf(1) / 2) < mpf("1e-70")
