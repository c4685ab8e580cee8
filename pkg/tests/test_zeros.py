import warnings
from fractions import Fraction

import pytest

from thetapow.arith import DomainError, Precision
from thetapow.coeffs import CoeffKey
from thetapow.zeros import (
    ContradictionError,
    ScanBudgetWarning,
    ZeroBracket,
    bisect_certified,
    certified_sign,
    find_zeros,
    scan_sign_changes,
)

P = Precision(30)


def test_bracket_validation():
    with pytest.raises(DomainError):
        ZeroBracket(3, 0, Fraction(-1, 5), Fraction(-1, 10), 1, 1)
    with pytest.raises(DomainError):
        ZeroBracket(3, 0, Fraction(-1, 10), Fraction(-1, 5), -1, 1)
    b = ZeroBracket(3, 0, Fraction(-1, 5), Fraction(-1, 10), -1, 1)
    assert b.width == Fraction(1, 10) and b.midpoint == Fraction(-3, 20)


def test_certified_sign():
    assert certified_sign(CoeffKey(3, 0), Fraction(-1, 10), P) == 1
    assert certified_sign(CoeffKey(3, 0), Fraction(-1, 2), P) == -1


def test_scan_finds_the_hexagonal_zero():
    res = scan_sign_changes(3, 0, Fraction(-1, 2), Fraction(-1, 100), 32, P)
    assert len(res) == 1 and not res.gaps
    b = res[0]
    assert b.lo < Fraction(-163034, 10**6) and Fraction(-163033, 10**6) < b.hi
    assert (b.sign_lo, b.sign_hi) == (-1, 1)


def test_scan_rejects_bad_window():
    with pytest.raises(DomainError):
        scan_sign_changes(3, 0, Fraction(-1, 10), Fraction(-1, 2), 10, P)
    with pytest.raises(DomainError):
        scan_sign_changes(3, 0, -1, Fraction(-1, 2), 10, P)


def test_bisection_keeps_signs_certified():
    b = scan_sign_changes(3, 0, Fraction(-1, 2), Fraction(-1, 100), 32, P)[0]
    fine = bisect_certified(b, Fraction(1, 10**9), P)
    assert fine.width <= Fraction(1, 10**9)
    assert b.lo <= fine.lo < fine.hi <= b.hi
    # both ends hold up at doubled precision
    P2 = Precision(60)
    assert certified_sign(CoeffKey(3, 0), fine.lo, P2) == -1
    assert certified_sign(CoeffKey(3, 0), fine.hi, P2) == 1
    with pytest.raises(DomainError):
        bisect_certified(b, 0, P)


def test_find_zeros_hexagonal():
    res = find_zeros(3, 0, P)
    assert len(res) == 1
    b = res[0]
    assert Fraction(-163034, 10**6) < b.lo < b.hi < Fraction(-163033, 10**6)


def test_find_zeros_stable_under_grid_doubling():
    a = find_zeros(4, 0, P, grid=64)
    b = find_zeros(4, 0, P, grid=128)
    assert len(a) == len(b) == 1
    assert a[0].lo < b[0].hi and b[0].lo < a[0].hi


def test_find_zeros_positive_coefficients_have_none():
    # γ_{2,1} = 2 Σ_{m>=1} q^{m(m-1)} has no zero on (-1, 0)
    assert len(find_zeros(2, 1, P, grid=64)) == 0


def test_zero_class_reports_gaps():
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        res = find_zeros(4, 1, P, grid=64)
    assert res.gaps
    assert any(issubclass(x.category, ScanBudgetWarning) for x in w)
    for lo, hi in res.gaps:
        assert Fraction(-999, 1000) <= lo < hi <= Fraction(-1, 1000)


def test_contradiction_is_raised_when_window_misses_the_zero():
    # γ_{3,0} > 0 on (-0.1, -0.01) although it tends to -∞
    with pytest.raises(ContradictionError):
        find_zeros(3, 0, P, window=(Fraction(-1, 10), Fraction(-1, 100)), grid=16)


def test_find_zeros_domain():
    with pytest.raises(DomainError):
        find_zeros(3, 3, P)
