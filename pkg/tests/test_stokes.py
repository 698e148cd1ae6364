import pytest
from mpmath import gamma, mp, mpf, pi

from charexp import (
    EquationParams,
    b_table,
    choose_lambda,
    derive_frame,
    e_grid,
    e_limit_estimate,
    h_coeff,
    stokes_multipliers,
)
from charexp.special import factorial, pochhammer


def simple_case():
    p = EquationParams(D=[0] * 6, L=0, B=[0, 0, 0, 0, 0, 9])
    return p, derive_frame(p, 0)


def generic_d3d6_zero():
    # D3 = D6 = 0, everything else active
    p = EquationParams(D=[1.2, -0.7, 0, 0.9, -1.1, 0], L=0.8, B=[1, -1, 2, 0.5, -0.5, 6])
    return p, derive_frame(p, p.L)


def closed_form_e00(frame, params, kappa):
    tau = frame.tau(kappa)
    return -pi / (gamma((tau - params.L) / 3) * gamma((tau + params.L) / 3))


def test_h_k0_is_one():
    p, fr = simple_case()
    bt = b_table(fr, p, -1, 10, 10, 10)
    assert h_coeff(fr, 1, 0, 0, 0, 3, 2, bt) == 1


def test_h_empty_range_is_zero():
    p, fr = simple_case()
    bt = b_table(fr, p, -1, 10, 10, 10)
    assert h_coeff(fr, 1, 2, 2, 1, 0, 0, bt) == 0


def test_h_saalschuetz_reduction():
    # with D3 = D6 = 0 the kernel sums to a ratio of Pochhammers, for any lambda
    p, fr_L = generic_d3d6_zero()
    for lam in (p.L, p.L + mpf(3) / 7):
        fr = derive_frame(p, lam)
        for kappa in (1, -1):
            bt = b_table(fr, p, -kappa, 12, 12, 12)
            for k in range(1, 11):
                got = h_coeff(fr, kappa, k, 0, 0, 0, 0, bt)
                want = (
                    pochhammer((lam - p.L) / 3, k)
                    * pochhammer((lam + p.L) / 3, k)
                    / (pochhammer(1 + fr.mu(-kappa), k) * factorial(k))
                )
                assert abs(got - want) <= mpf("1e-20") * max(mpf(1), abs(want))


def test_e00_simple_cubic_is_minus_one():
    p, fr = simple_case()
    for kappa in (1, -1):
        g = e_grid(fr, p, kappa, 0, 40, 10)
        assert abs(g.value(0, 0) + 1) < mpf("1e-20")


def test_e00_lambda_L_is_m_independent():
    p, fr = generic_d3d6_zero()
    want = {k: closed_form_e00(fr, p, k) for k in (1, -1)}
    for kappa in (1, -1):
        g40 = e_grid(fr, p, kappa, 0, 40, 10, with_variants=False)
        g80 = e_grid(fr, p, kappa, 0, 80, 10, with_variants=False)
        v40, v80 = g40.value(0, 0), g80.value(0, 0)
        assert abs(v40 - v80) <= mpf("1e-20") * abs(v80)
        assert abs(v80 - want[kappa]) <= mpf("1e-20") * abs(want[kappa])


def test_higher_entries_vanish_when_t_zero():
    # t10 = t20 = 0 and D = 0 kill every source feeding n1, n2 > 0
    p, fr = simple_case()
    g = e_grid(fr, p, 1, 6, 40, 8)
    for (n1, n2), v in g.entries.items():
        if (n1, n2) != (0, 0):
            assert v == 0


def test_e_value_stable_under_m_increase():
    # value at (m) vs (m+10) must differ by less than the reported estimate
    p = EquationParams(D=[0.5, -0.2, 0.8, -0.4, 0.3, 1.2], L=0.7, B=[0.4, 0.6, -0.5, 0.9, -0.7, 6])
    fr = derive_frame(p, p.L)
    g = e_grid(fr, p, 1, 4, 60, 10)
    g2 = e_grid(fr, p, 1, 4, 70, 10, with_variants=False)
    for key, v in g.entries.items():
        est = g.err[key]
        assert abs(v - g2.entries[key]) <= est + mpf("1e-40")


def test_e00_lambda_invariance():
    p = EquationParams(D=[0.5, -0.2, 0.8, -0.4, 0.3, 1.2], L=0.7, B=[0.4, 0.6, -0.5, 0.9, -0.7, 6])
    lam0 = choose_lambda(p)
    fr1 = derive_frame(p, lam0)
    fr2 = derive_frame(p, lam0 + mpf("0.37"))
    g1 = e_grid(fr1, p, 1, 0, 80, 10)
    g2 = e_grid(fr2, p, 1, 0, 80, 10)
    combined = g1.err[(0, 0)] + g2.err[(0, 0)] + mpf("1e-45")
    assert abs(g1.value(0, 0) - g2.value(0, 0)) <= combined


def test_limit_estimate_collapses_when_t_zero():
    p, fr = simple_case()
    bt = b_table(fr, p, 1, 50, 3, 3)
    est = e_limit_estimate(fr, 1, 1, 1, 50, bt)
    # double sum collapses to the single b(kappa; m, 1, 1) term
    from mpmath import exp, loggamma

    direct = (
        -pi
        * exp(loggamma(mpf(51)) - loggamma(1 + fr.mu_plus + 50) - loggamma(-fr.mu_minus - 1 + 50))
        * mpf(2) ** 50
        * bt.get(50, 1, 1)
    )
    assert abs(est - direct) < mpf("1e-60")


def test_limit_estimate_exact_at_lambda_L():
    # at lambda = L the gamma ratios collapse and the bare limit formula is
    # already exact at every finite m (D3 = D6 = 0 case)
    p, fr = generic_d3d6_zero()
    want = closed_form_e00(fr, p, 1)
    bt = b_table(fr, p, 1, 100, 0, 0)
    for m in (50, 100):
        got = e_limit_estimate(fr, 1, 0, 0, m, bt)
        assert abs(got - want) <= mpf("1e-70") * abs(want)


def test_limit_estimate_converges_like_one_over_m():
    # at generic lambda the limit formula carries a relative O(1/m) error
    p, _ = generic_d3d6_zero()
    fr = derive_frame(p, p.L + mpf(1) / 3)
    want = closed_form_e00(fr, p, 1)
    bt = b_table(fr, p, 1, 100, 0, 0)
    err50 = abs(e_limit_estimate(fr, 1, 0, 0, 50, bt) - want)
    err100 = abs(e_limit_estimate(fr, 1, 0, 0, 100, bt) - want)
    assert err100 < err50
    ratio = err50 / err100
    assert mpf("1.5") < ratio < mpf("3.0")  # ~2 expected for O(1/m)


def test_limit_estimate_near_e_grid():
    p, fr = generic_d3d6_zero()
    m = 80
    g = e_grid(fr, p, 1, 4, m, 10, with_variants=False)
    bt = b_table(fr, p, 1, m, 2, 4)
    for key in ((0, 1), (1, 0)):
        est = e_limit_estimate(fr, 1, key[0], key[1], m, bt)
        v = g.value(*key)
        # leading-order agreement: off by a relative O(1/m) correction
        assert abs(est - v) <= 20 * abs(v) / m


def test_eta_identities():
    p, fr = simple_case()
    g_p = e_grid(fr, p, 1, 0, 40, 8, with_variants=False)
    g_m = e_grid(fr, p, -1, 0, 40, 8, with_variants=False)
    ss = stokes_multipliers(fr, g_p, g_m, 0)
    eta = ss.eta
    assert abs(eta ** 6 - 1) < mpf("1e-70")
    assert abs(1 + eta ** 2 + eta ** 4) < mpf("1e-70")


def test_sigma_reduces_to_S0_when_S1_S2_vanish():
    p, fr = simple_case()
    g_p = e_grid(fr, p, 1, 12, 40, 8, with_variants=False)
    g_m = e_grid(fr, p, -1, 12, 40, 8, with_variants=False)
    ss = stokes_multipliers(fr, g_p, g_m, 12)
    for kappa in (1, -1):
        assert ss.S[(1, kappa)] == 0 and ss.S[(2, kappa)] == 0
        for n in (0, 1, 2):
            assert abs(ss.sigma[(n, kappa)] - ss.S[(0, kappa)]) < mpf("1e-70")
    assert all(ss.converged.values())


def test_leading_terms_of_partial_sums():
    # S0 starts with e(0,0); S1 with e(0,1); S2 with e(1,0) + e(0,2)
    p = EquationParams(D=[0] * 6, L=0.3, B=[0.5, -0.3, 0.7, 1.1, -0.8, 4])
    fr = derive_frame(p, p.L)
    g_p = e_grid(fr, p, 1, 2, 50, 10, with_variants=False)
    g_m = e_grid(fr, p, -1, 2, 50, 10, with_variants=False)
    ss = stokes_multipliers(fr, g_p, g_m, 2)
    assert ss.S[(0, 1)] == g_p.value(0, 0)
    assert ss.S[(1, 1)] == g_p.value(0, 1)
    assert ss.S[(2, 1)] == g_p.value(1, 0) + g_p.value(0, 2)


def test_recompute_sigma_is_consistent():
    p = EquationParams(D=[0] * 6, L=0.3, B=[0.5, -0.3, 0.7, 1.1, -0.8, 4])
    fr = derive_frame(p, p.L)
    g_p = e_grid(fr, p, 1, 6, 50, 10, with_variants=False)
    g_m = e_grid(fr, p, -1, 6, 50, 10, with_variants=False)
    ss = stokes_multipliers(fr, g_p, g_m, 6)
    again = ss.recompute_sigma()
    for key, v in ss.sigma.items():
        assert v == again[key]
