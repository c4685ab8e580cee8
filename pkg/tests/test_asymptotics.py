from fractions import Fraction

import mpmath as mp
import pytest

from thetapow.arith import DomainError, ErrValue, Precision, TauPoint
from thetapow.asymptotics import (
    Verdict,
    binomial_residue_closed,
    binomial_residue_sums,
    classify,
    f_main_constant,
    f_main_term,
    gamma_asymptotic_estimate,
    gamma_profile,
    prop314_leading,
    vanishing_sets,
)
from thetapow.coeffs import CoeffKey, gamma_eval
from thetapow.modular import (
    ModularPoint,
    S_kn_eval,
    gamma_modular_eval,
    lambda_system,
    s_alpha_modular,
    theta_qk_one,
    theta_qk_one_asymptote,
)
from thetapow.theta import vartheta_rebased

P = Precision(40)


def test_modular_point_invariants():
    with P.context():
        m = ModularPoint(mp.mpf("0.07"))
        assert abs((2 * m.tau - 1) * (2 * m.tau_prime + 1) + 1) < mp.mpf(10) ** -45
        assert abs(m.q_prime) == mp.exp(-mp.pi / (2 * m.t))
        assert ModularPoint(mp.mpf("0.01")).q_prime > -mp.mpf(10) ** -60
        with pytest.raises(DomainError):
            ModularPoint(0)


def test_lambda_systems_have_k_elements_mod_2():
    for k in range(1, 9):
        for n in range(k):
            lam = lambda_system(k, n)
            assert len(lam) == k
            assert len({a % 2 for a in lam}) == k
            assert all(((a * k) - n) % 2 == 0 for a in lam)


def test_s_alpha_special_values():
    mpt = ModularPoint(mp.mpf("0.3"))
    assert s_alpha_modular(mpt, 4, 2, Fraction(-1, 2), P).contains(0)
    with P.context():
        for n in (0, 2):
            for a in (Fraction(1, 3), Fraction(-5, 7), Fraction(0)):
                x = s_alpha_modular(mpt, 5, n, a, P)
                y = s_alpha_modular(mpt, 5, n, a + 2, P)
                # shifting m by 2 leaves the phase e^{2πin/k}; the k-th power is 2-periodic
                assert y.agrees_with(x * ErrValue(mp.expjpi(mp.mpf(2 * n) / 5)))
                assert (y**5).agrees_with(x**5)


def test_s_zero_two_term_expansion():
    # s_0 = 1 - 2iε + O(ε^4) with ε = e^{-π/(4t)}, so s_0^3 = 1 - 6iε - 12ε² + O(ε³)
    t = mp.mpf("0.05")
    with P.context():
        s = s_alpha_modular(ModularPoint(t), 3, 0, 0, P) ** 3
        approx = 1 - 6j * mp.exp(-mp.pi / (4 * t))
        eps = mp.exp(-mp.pi / (4 * t))
        assert abs(s.value - approx) < 13 * eps**2
        assert abs(s.value - approx + 12 * eps**2) < 10 * eps**3


@pytest.mark.parametrize("k,n", [(4, 0), (3, 0), (4, 1), (5, 2), (6, 3), (7, 1)])
def test_S_against_leading_terms(k, n):
    t = mp.mpf("0.03")
    with P.context():
        S = S_kn_eval(ModularPoint(t), k, n, P).value
        lead = prop314_leading(k, n, t)
        # the neglected part is second order in e^{-π/(4kt)}
        assert abs(S - lead) < 10 * mp.exp(-mp.pi / (4 * k * t)) ** 2 + mp.mpf(10) ** -30


@pytest.mark.parametrize("k", range(1, 9))
def test_theta_qk_one_transform(k):
    with P.context():
        mpt = ModularPoint(mp.mpf("0.11"))
        direct = vartheta_rebased(TauPoint(mpt.tau), k, 0, 1, P)
        assert theta_qk_one(mpt, k, P).agrees_with(direct)


def test_theta_asymptote_k2_uses_pi():
    t = mp.mpf("0.05")
    with P.context():
        v = vartheta_rebased(TauPoint(ModularPoint(t).tau), 2, 0, 1, P).value
        assert abs(v / theta_qk_one_asymptote(2, t) - 1) < mp.mpf(10) ** -20
        assert abs(v / theta_qk_one_asymptote(2, t, as_printed=True) - 1) > 0.5


@pytest.mark.parametrize("k,n", [(3, 0), (4, 1), (5, 3), (6, 2), (7, 0)])
def test_modular_route_matches_series(k, n):
    q = Fraction(-2, 5)
    assert gamma_modular_eval(k, n, q, P).agrees_with(gamma_eval(CoeffKey(k, n), q, P, route="series"))


def test_classify_examples():
    v = classify(4, 0)
    assert v.verdict is Verdict.MINUS_INFINITY and v.corollary_flag
    assert classify(4, 1).verdict is Verdict.TENDS_TO_ZERO
    v = classify(3, 1)
    assert v.verdict is Verdict.PLUS_INFINITY
    assert v.predicted_constant == pytest.approx(2**0.5)
    assert classify(3, 0).predicted_constant == pytest.approx(-(2**0.5))
    assert classify(10, 0).complementary_flag
    assert not classify(6, 0).complementary_flag
    with pytest.raises(DomainError):
        classify(2, 0)


def test_classification_consistent_with_signs_for_k_up_to_16():
    for k in range(3, 17):
        for n in range(k):
            v = classify(k, n)
            zero = k % 2 == 0 and (k - 2 * n) % 4 == 2
            assert (v.verdict is Verdict.TENDS_TO_ZERO) == zero
            if v.corollary_flag:
                assert v.verdict is Verdict.MINUS_INFINITY


def test_classification_against_numerics():
    # sign of γ_{k,n} close to -1 through the modular route
    q = Fraction(-9999, 10000)
    for k in range(3, 9):
        for n in range(k):
            v = classify(k, n)
            if v.verdict is Verdict.TENDS_TO_ZERO:
                continue
            g = gamma_eval(CoeffKey(k, n), q, P)
            assert g.certified_sign() == v.sign, (k, n)


def test_vanishing_sets():
    X, Y = vanishing_sets(8)
    assert X == {2, 6} and str(Y) == "4Z+2"
    X, Y = vanishing_sets(4)
    assert X == {0, 4} and str(Y) == "4Z"
    # the condition k - 2n mod 8 in {3,4,5} gives {0, 3} for k = 3
    X, Y = vanishing_sets(3)
    assert X == {0, 3} and str(Y) == "3Z"
    X, Y = vanishing_sets(16)
    assert X == {2, 6, 10, 14} and 18 in Y


def test_f_main_term_constants():
    assert f_main_constant(3, 0) == pytest.approx(-(mp.pi**1.5) * 2**0.5 / 2)
    assert f_main_constant(2, 0) == pytest.approx(-mp.pi / mp.sqrt(3))
    assert f_main_constant(4, 1) < 0
    assert f_main_term(3, 0, 0.99) == pytest.approx(f_main_constant(3, 0) / 0.01**1.5)


def test_gamma_profile():
    assert gamma_profile(3, 0, mp.mpf("0.1")) == pytest.approx(1 / (3**0.5 * 2**1.5 * 0.1))
    t = mp.mpf("0.05")
    ratio = gamma_profile(4, 2, t) / gamma_profile(4, 2, t, as_printed=True)
    assert ratio == pytest.approx(mp.exp(2 * mp.pi * 4 * t / 4))


def test_estimate_signs_and_zero_class():
    t = mp.mpf("0.05")
    assert gamma_asymptotic_estimate(3, 0, t).value < 0
    assert gamma_asymptotic_estimate(4, 0, t).value == pytest.approx(-2 * gamma_profile(4, 0, t))
    z = gamma_asymptotic_estimate(4, 1, t)
    assert z.value == 0 and z.radius > 0
    with pytest.raises(DomainError):
        gamma_asymptotic_estimate(4, 1, mp.mpf("0.5"))


def test_printed_profile_fails_to_converge():
    # with the printed exponent sign, the ratio drifts away from ±√2 for n ≠ 0
    k, n = 3, 1
    ratios = []
    for t in ("0.10", "0.05"):
        with P.context():
            tt = mp.mpf(t)
            g = gamma_eval(CoeffKey(k, n), ErrValue(-mp.exp(-2 * mp.pi * tt)), P).value
            ratios.append(g / (mp.sqrt(2) * gamma_profile(k, n, tt, as_printed=True)))
    assert abs(ratios[-1] - 1) > 0.1


def test_binomial_residue_sums():
    assert binomial_residue_sums(4) == (2, 4, 6, 4)
    for k in range(1, 21):
        s = binomial_residue_sums(k)
        assert sum(s) == 2**k
        assert s[0] - s[1] + s[2] - s[3] == 0
        with mp.workdps(40):
            assert all(abs(a - b) < 1e-20 for a, b in zip(s, binomial_residue_closed(k)))
            even = mp.mpf(2) ** (mp.mpf(k + 1) / 2) * mp.cospi(mp.mpf(k + 1) / 4)
            odd = mp.mpf(2) ** (mp.mpf(k + 1) / 2) * mp.cospi(mp.mpf(k - 1) / 4)
            assert abs(s[0] - s[1] - s[2] + s[3] - even) < 1e-20
            assert abs(s[0] + s[1] - s[2] - s[3] - odd) < 1e-20
