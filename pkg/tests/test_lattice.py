from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest

from thetapow.arith import DomainError, ErrValue, NonconvergenceError, Precision
from thetapow.coeffs import CoeffKey, ScaleError, gamma_eval
from thetapow.lattice import (
    QuadLinForm,
    ThetaPowerForm,
    ellipsoid_volume,
    f_kn_eval,
    lattice_count,
    phi_eval,
    poisson_residual,
    random_form,
    s_alpha_eval,
    s_alpha_main_term,
)
from thetapow.theta import sample_points

P = Precision(30)
HEX = ThetaPowerForm(2).quad_lin()


def test_theta_power_form():
    f = ThetaPowerForm(3, 1)
    assert f.D_Q == Fraction(4, 8)
    assert f.quad_lin().discriminant == f.D_Q
    assert HEX.value((1, -1)) == 1
    assert HEX.value((1, 1)) == 3


def test_rejects_indefinite_or_malformed():
    with pytest.raises(DomainError):
        QuadLinForm([[1, 2], [2, 1]])
    with pytest.raises(DomainError):
        QuadLinForm([[1, 0], [1, 1]])
    with pytest.raises(DomainError):
        QuadLinForm([[1]], [1, 2])


def test_counts_small_radius():
    assert lattice_count(HEX, 0) == 1
    assert lattice_count(HEX, 1) == 7
    # brute force over a box that is certainly large enough
    brute = sum(1 for x in range(-8, 9) for y in range(-8, 9) if x * x + x * y + y * y <= 30)
    assert lattice_count(HEX, 30) == brute


def test_count_with_linear_part():
    form = QuadLinForm([[1, 0], [0, 2]], [Fraction(1, 2), -1])
    brute = sum(1 for x in range(-10, 11) for y in range(-10, 11) if form.value((x, y)) <= Fraction(23, 2))
    assert lattice_count(form, Fraction(23, 2)) == brute


def test_count_nondecreasing():
    counts = [lattice_count(HEX, M) for M in range(0, 60)]
    assert counts == sorted(counts)


def test_count_budget():
    with pytest.raises(ScaleError):
        lattice_count(ThetaPowerForm(6).quad_lin(), 10**6)


def test_volumes():
    assert ellipsoid_volume(QuadLinForm([[1]]), 1) == pytest.approx(2)
    assert ellipsoid_volume(QuadLinForm([[1, 0], [0, 1]]), 1) == pytest.approx(mp.pi)
    assert ellipsoid_volume(HEX, 1) == pytest.approx(2 * mp.pi / mp.sqrt(3))
    # a linear part only recentres: x² + 2x <= 0 is [-2, 0]
    assert ellipsoid_volume(QuadLinForm([[1]], [2]), 0) == pytest.approx(2)
    with pytest.raises(DomainError):
        ellipsoid_volume(HEX, -1)


def test_count_near_ellipse_area():
    c = lattice_count(HEX, 100)
    assert abs(c - 100 * 2 * mp.pi / mp.sqrt(3)) < 3 * 100**0.5


def test_f_kn_small_values():
    v = f_kn_eval(2, 0, Fraction(1, 10), P)
    # r(0..7) = 1, 6, 0, 6, 6, 0, 0, 12
    partial = 1 + 6 * mp.mpf("0.1") + 6 * mp.mpf("0.001") + 6 * mp.mpf("0.0001") + 12 * mp.mpf("1e-7")
    assert abs(v.value - partial) < 1e-8
    assert f_kn_eval(2, 0, 0, P).value == 1
    assert f_kn_eval(2, 1, Fraction(1, 10), P).agrees_with(gamma_eval(CoeffKey(3, 1), Fraction(1, 10), P))


def test_f_kn_matches_gamma_at_random_q():
    for tp, _ in sample_points(20, seed=21):
        with P.context():
            q = tp.q_err()
            for k, n in ((2, 3), (3, 2), (1, 4)):
                lhs = q ** (n * (n - 1) // 2) * f_kn_eval(k, n, q, P)
                assert lhs.agrees_with(gamma_eval(CoeffKey(k + 1, n), q, P))


def test_phi_shell_sum():
    # r(0..4) = 1, 6, 0, 6, 6 for the hexagonal form
    v = phi_eval(HEX, Fraction(1, 2), P)
    assert v.value > mp.mpf("5.1875")
    with P.context():
        oracle = mp.fsum(
            mp.mpf(2) ** -(x * x + x * y + y * y) for x in range(-40, 41) for y in range(-40, 41)
        )
    assert v.contains(oracle)


def test_phi_matches_gamma_route():
    assert phi_eval(HEX, Fraction(3, 10), P).agrees_with(gamma_eval(CoeffKey(3, 0), Fraction(3, 10), P))


def test_phi_minimal_shell_and_complex_argument():
    assert phi_eval(HEX, 0, P).value == 1
    x = mp.mpc("0.2", "0.3")
    assert phi_eval(HEX, x, P).agrees_with(gamma_eval(CoeffKey(3, 0), x, P, route="series"))


def test_phi_fractional_exponents_need_positive_x():
    form = QuadLinForm([[1]], [Fraction(1, 3)])
    phi_eval(form, Fraction(1, 2), P)
    with pytest.raises(DomainError):
        phi_eval(form, Fraction(-1, 2), P)
    with pytest.raises(NonconvergenceError):
        phi_eval(form, 1, P)


def test_phi_asymptotic_normalisation():
    x = mp.mpf("0.99")
    v = phi_eval(HEX, Fraction(99, 100), P).value
    ratio = v * (1 - x) * mp.sqrt(mp.mpf(3) / 4) / mp.pi
    assert 0.8 <= ratio <= 1.2


def test_parity_decomposition():
    for x in (Fraction(1, 5), Fraction(1, 2), Fraction(4, 5)):
        lhs = phi_eval(HEX, -x, P)
        rhs = ErrValue(2) * phi_eval(HEX, x**4, P) - phi_eval(HEX, x, P)
        assert lhs.agrees_with(rhs)


def test_s_alpha_closed_forms():
    assert s_alpha_eval(1, 0.5, P).contains(2)
    assert s_alpha_eval(2, 0.5, P).contains(6)
    v = s_alpha_eval(1.5, 0.99, P).value
    assert 0.9 <= v / s_alpha_main_term(1.5, 0.99) <= 1.1
    with pytest.raises(DomainError):
        s_alpha_eval(1, 1.5, P)


def test_s_alpha_monotone_in_x():
    vals = [s_alpha_eval(2.5, x, P).value for x in (0.1, 0.5, 0.9, 0.99)]
    assert vals == sorted(vals)


def test_poisson_examples():
    with P.context():
        r = poisson_residual(QuadLinForm([[mp.pi]]), P)
        assert r.contains(0)
    assert poisson_residual(HEX, P).contains(0)
    assert poisson_residual(QuadLinForm(HEX.A, [1, 1]), P).contains(0)


def test_poisson_radius_is_tight():
    r = poisson_residual(HEX, P)
    assert r.radius < mp.mpf(10) ** -25


def test_poisson_random_forms():
    rng = np.random.default_rng(0x5EED)
    for k in (1, 2, 3, 3, 2):
        form = random_form(k, rng)
        assert poisson_residual(form, P).contains(0)
