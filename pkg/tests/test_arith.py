from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thetapow.arith import (
    DomainError,
    ErrValue,
    NonconvergenceError,
    Precision,
    TauPoint,
    geometric_tail_bound,
    qpow,
    tau_from_negative_real,
    tau_from_q,
)

rationals = st.fractions(min_value=-1000, max_value=1000, max_denominator=10**6)
nonzero = rationals.filter(lambda f: f != 0)


def _hi(f: Fraction) -> mp.mpf:
    with mp.workdps(200):
        return mp.mpf(f.numerator) / f.denominator


def _encloses(v: ErrValue, exact: Fraction) -> bool:
    with mp.workdps(200):
        return abs(v.value - _hi(exact)) <= v.radius


@settings(max_examples=200, deadline=None)
@given(rationals, rationals)
def test_add_sub_mul_enclose_exact(a, b):
    with Precision(20).context():
        x, y = ErrValue.exact(a), ErrValue.exact(b)
        assert _encloses(x + y, a + b)
        assert _encloses(x - y, a - b)
        assert _encloses(x * y, a * b)


@settings(max_examples=200, deadline=None)
@given(rationals, nonzero)
def test_division_encloses_exact(a, b):
    with Precision(20).context():
        assert _encloses(ErrValue.exact(a) / ErrValue.exact(b), a / b)


@settings(max_examples=100, deadline=None)
@given(nonzero, st.integers(min_value=-6, max_value=6))
def test_integer_powers_enclose_exact(a, n):
    with Precision(20).context():
        assert _encloses(ErrValue.exact(a) ** n, a**n)


def test_division_by_uncertain_zero_refuses():
    with pytest.raises(ZeroDivisionError):
        ErrValue(1) / ErrValue(mp.mpf("1e-30"), mp.mpf("1e-20"))


def test_certified_sign_needs_radius_below_value():
    assert ErrValue(-3, 1).certified_sign() == -1
    assert ErrValue(2, 1).certified_sign() == 1
    assert ErrValue(1, 1).certified_sign() == 0


def test_negative_radius_rejected():
    with pytest.raises(DomainError):
        ErrValue(1, -1)


def test_exact_integers_carry_no_radius():
    assert ErrValue.exact(12345).radius == 0
    assert ErrValue.exact(Fraction(1, 3)).radius > 0


def test_precision_floor():
    with pytest.raises(DomainError):
        Precision(10)
    p = Precision(30)
    assert p.working_dps > 30
    assert p.target == mp.mpf(10) ** -30


def test_sqrt_and_exp():
    with Precision(30).context():
        r = ErrValue.exact(2).sqrt()
        assert r.contains(mp.sqrt(2))
        e = ErrValue(1, mp.mpf("1e-10")).exp()
        assert e.radius >= mp.e * mp.mpf("1e-10")


def test_tau_from_negative_real_roundtrip():
    with Precision(30).context():
        tp = tau_from_negative_real(Fraction(-1, 3))
        assert tp.tau.real == mp.mpf(1) / 2
        assert abs(tp.q - mp.mpf(-1) / 3) < mp.mpf(10) ** -35
        with pytest.raises(DomainError):
            tau_from_negative_real(Fraction(1, 3))


def test_tau_from_q_keeps_real_part_nonnegative():
    with Precision(30).context():
        q = mp.mpc("0.2", "-0.3")
        tp = tau_from_q(q)
        assert 0 <= tp.tau.real < 1
        assert abs(tp.q - q) < mp.mpf(10) ** -35


def test_qpow_half_follows_tau_branch():
    # tau = 1/2 + it gives q = -e^{-2 pi t}; q^{1/2} = i e^{-pi t}
    with Precision(30).context():
        tp = TauPoint.from_t(mp.mpf("0.1"))
        h = qpow(tp, Fraction(1, 2))
        assert h.contains(1j * mp.exp(-mp.pi / 10))
        assert (h * h).agrees_with(ErrValue(tp.q))


def test_geometric_tail_bound():
    assert geometric_tail_bound(0.5, 1.0) == 2.0
    with pytest.raises(NonconvergenceError):
        geometric_tail_bound(1.0, 1.0)
    with pytest.raises(DomainError):
        geometric_tail_bound(-0.1, 1.0)
