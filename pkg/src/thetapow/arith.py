"""Error-tracked multiprecision numbers and the branch conventions for q^alpha.

Every analytic evaluation in the package returns an :class:`ErrValue`: a
multiprecision real or complex centre together with an absolute error radius.
Propagation is first order, and each arithmetic operation folds a 2-ulp
rounding slack into the radius.

Non-integral powers of the nome are never taken as ``q**alpha``.  A
:class:`TauPoint` fixes ``tau`` with ``q = exp(2 pi i tau)`` once, and
:func:`qpow` returns ``exp(2 pi i alpha tau)``.
"""
from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import mpmath as mp

__all__ = [
    "DomainError",
    "NonconvergenceError",
    "PrecisionCeilingError",
    "Precision",
    "ErrValue",
    "TauPoint",
    "as_errvalue",
    "tau_from_negative_real",
    "tau_from_q",
    "qpow",
    "geometric_tail_bound",
]

GUARD_DIGITS = 12


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class NonconvergenceError(ArithmeticError):
    """A series majorant does not converge for the requested argument."""


class PrecisionCeilingError(ArithmeticError):
    """A sign or value could not be certified at the maximum precision."""


@dataclass(frozen=True)
class Precision:
    """Working precision in decimal digits.

    Truncation targets are ``10**-digits``; arithmetic runs with a few guard
    digits on top so rounding stays well below the truncation error.
    """

    digits: int = 50

    def __post_init__(self):
        if int(self.digits) != self.digits or self.digits < 15:
            raise DomainError(f"precision must be an integer >= 15 digits, got {self.digits}")

    @property
    def working_dps(self) -> int:
        return self.digits + GUARD_DIGITS

    @property
    def target(self) -> mp.mpf:
        return mp.mpf(10) ** (-self.digits)

    @contextmanager
    def context(self):
        with mp.workdps(self.working_dps):
            yield self

    def scaled(self, factor: float) -> "Precision":
        return Precision(max(15, int(math.ceil(self.digits * factor))))


DEFAULT_PRECISION = Precision(50)


def _prec(prec: Precision | int | None) -> Precision:
    if prec is None:
        return DEFAULT_PRECISION
    if isinstance(prec, Precision):
        return prec
    return Precision(int(prec))


def _ulp_slack(value) -> mp.mpf:
    # two units in the last place of the current working precision
    return 2 * mp.eps * abs(value)


def _up(r) -> mp.mpf:
    # radii are accumulated with a small upward bias to absorb their own rounding
    return mp.mpf(r) * (1 + 8 * mp.eps)


class ErrValue:
    """A multiprecision number with a rigorous absolute error radius."""

    __slots__ = ("value", "radius")

    def __init__(self, value, radius=0):
        if isinstance(value, ErrValue):
            radius = radius + value.radius
            value = value.value
        if isinstance(value, (complex, mp.mpc)):
            self.value = mp.mpc(value)
        else:
            self.value = mp.mpf(value) if not isinstance(value, Fraction) else mp.mpf(value.numerator) / value.denominator
        radius = mp.mpf(radius)
        if radius < 0:
            raise DomainError("error radius must be nonnegative")
        self.radius = radius

    @classmethod
    def exact(cls, value) -> "ErrValue":
        """Wrap ``value`` with the rounding error of its conversion only."""
        if isinstance(value, Fraction) or (isinstance(value, Rational) and not isinstance(value, int)):
            v = mp.mpf(value.numerator) / value.denominator
            return cls(v, _ulp_slack(v))
        if isinstance(value, int):
            v = mp.mpf(value)
            return cls(v, 0 if abs(value) < 2 ** (mp.mp.prec - 1) else _ulp_slack(v))
        if isinstance(value, float):
            return cls(mp.mpf(value), 0)
        if isinstance(value, complex):
            return cls(mp.mpc(value), 0)
        if isinstance(value, (mp.mpf, mp.mpc)):
            return cls(value, 0)
        if isinstance(value, str):
            v = mp.mpf(value)
            return cls(v, _ulp_slack(v))
        raise TypeError(f"cannot convert {type(value).__name__} to ErrValue")

    # -- inspection -------------------------------------------------------
    @property
    def is_real(self) -> bool:
        return isinstance(self.value, mp.mpf) or self.value.imag == 0

    @property
    def real(self) -> "ErrValue":
        return ErrValue(mp.re(self.value), self.radius)

    @property
    def imag(self) -> "ErrValue":
        return ErrValue(mp.im(self.value), self.radius)

    def abs_upper(self) -> mp.mpf:
        return _up(abs(self.value) + self.radius)

    def abs_lower(self) -> mp.mpf:
        return max(mp.mpf(0), abs(self.value) - self.radius)

    def certified_nonzero(self) -> bool:
        return abs(self.value) > self.radius

    def certified_sign(self) -> int:
        """+1 or -1 when the real part's sign is certain and the value is real
        within the radius; 0 otherwise."""
        re = mp.re(self.value)
        if abs(re) > self.radius:
            return 1 if re > 0 else -1
        return 0

    def agrees_with(self, other, slack=0) -> bool:
        other = as_errvalue(other)
        return abs(self.value - other.value) <= _up(self.radius + other.radius + slack)

    def contains(self, x) -> bool:
        return abs(self.value - x) <= self.radius

    def to_complex(self) -> complex:
        return complex(self.value)

    def __float__(self):
        return float(mp.re(self.value))

    def __repr__(self):
        return f"ErrValue({mp.nstr(self.value, 20)}, radius={mp.nstr(self.radius, 3)})"

    # -- arithmetic -------------------------------------------------------
    def __neg__(self):
        return ErrValue(-self.value, self.radius)

    def __pos__(self):
        return self

    def __add__(self, other):
        other = as_errvalue(other)
        v = self.value + other.value
        return ErrValue(v, _up(self.radius + other.radius + _ulp_slack(v)))

    __radd__ = __add__

    def __sub__(self, other):
        other = as_errvalue(other)
        v = self.value - other.value
        return ErrValue(v, _up(self.radius + other.radius + _ulp_slack(v)))

    def __rsub__(self, other):
        return as_errvalue(other) - self

    def __mul__(self, other):
        other = as_errvalue(other)
        v = self.value * other.value
        r = abs(self.value) * other.radius + abs(other.value) * self.radius + self.radius * other.radius
        return ErrValue(v, _up(r + _ulp_slack(v)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_errvalue(other)
        if not other.certified_nonzero():
            raise ZeroDivisionError("division by a value not certified nonzero")
        v = self.value / other.value
        lower = abs(other.value) - other.radius
        r = (self.radius + abs(v) * other.radius) / lower
        return ErrValue(v, _up(r + _ulp_slack(v)))

    def __rtruediv__(self, other):
        return as_errvalue(other) / self

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("ErrValue powers are integral; use qpow for q^alpha")
        if n < 0:
            return ErrValue.exact(1) / (self ** (-n))
        result = ErrValue(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def conjugate(self):
        return ErrValue(mp.conj(self.value), self.radius)

    def exp(self):
        v = mp.exp(self.value)
        return ErrValue(v, _up(abs(v) * (mp.exp(self.radius) - 1) + _ulp_slack(v)))

    def sqrt(self):
        """Principal square root, valid away from the branch cut and from 0."""
        if not self.certified_nonzero():
            raise DomainError("square root of a value not certified nonzero")
        v = mp.sqrt(self.value)
        r = self.radius / (abs(v) + mp.sqrt(self.abs_lower()))
        return ErrValue(v, _up(r + _ulp_slack(v)))


def as_errvalue(x) -> ErrValue:
    if isinstance(x, ErrValue):
        return x
    return ErrValue.exact(x)


def errsum(values) -> ErrValue:
    """Sum with one rounding slack per term (cheaper than chained ``+``)."""
    total = mp.mpf(0)
    rad = mp.mpf(0)
    mag = mp.mpf(0)
    count = 0
    for v in values:
        v = as_errvalue(v)
        total += v.value
        rad += v.radius
        mag += abs(v.value)
        count += 1
    return ErrValue(total, _up(rad + 2 * (count + 1) * mp.eps * mag))


@dataclass(frozen=True)
class TauPoint:
    """A point of the upper half-plane; ``q = exp(2 pi i tau)``.

    The branch of every non-integral power of ``q`` is fixed by ``tau``.
    """

    tau: mp.mpc

    def __post_init__(self):
        tau = mp.mpc(self.tau)
        if tau.imag <= 0:
            raise DomainError("tau must lie in the upper half-plane")
        object.__setattr__(self, "tau", tau)

    @classmethod
    def from_t(cls, t, shift=Fraction(1, 2)) -> "TauPoint":
        """``tau = shift + i t``; the default gives ``q = exp(pi i - 2 pi t)``."""
        return cls(mp.mpc(mp.mpf(shift.numerator) / shift.denominator, mp.mpf(t)))

    @property
    def t(self) -> mp.mpf:
        return self.tau.imag

    @property
    def q(self) -> mp.mpc:
        return mp.exp(2j * mp.pi * self.tau)

    def q_err(self) -> ErrValue:
        return qpow(self, 1)

    @property
    def abs_q(self) -> mp.mpf:
        return mp.exp(-2 * mp.pi * self.tau.imag)


def tau_from_negative_real(q_neg, prec: Precision | None = None) -> TauPoint:
    """TauPoint with ``tau = 1/2 + i t`` and ``q = -exp(-2 pi t) = q_neg``."""
    prec = _prec(prec)
    with prec.context():
        qv = q_neg.value if isinstance(q_neg, ErrValue) else _to_mpf(q_neg)
        if isinstance(qv, mp.mpc):
            if qv.imag != 0:
                raise DomainError("q_neg must be real")
            qv = qv.real
        if not (-1 < qv < 0):
            raise DomainError(f"q_neg must lie in (-1, 0), got {q_neg}")
        t = -mp.log(-qv) / (2 * mp.pi)
        return TauPoint(mp.mpc(mp.mpf(1) / 2, t))


def tau_from_q(q, prec: Precision | None = None) -> TauPoint:
    """TauPoint for an arbitrary nome, using the principal logarithm.

    Negative real nomes are sent to ``Re tau = 1/2``.
    """
    prec = _prec(prec)
    with prec.context():
        qv = q.value if isinstance(q, ErrValue) else _to_mpc(q)
        if qv == 0 or abs(qv) >= 1:
            raise DomainError("need 0 < |q| < 1")
        tau = mp.log(qv) / (2j * mp.pi)
        if mp.re(tau) < 0:
            tau += 1
        return TauPoint(tau)


def _to_mpf(x):
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


def _to_mpc(x):
    if isinstance(x, Fraction):
        return mp.mpc(mp.mpf(x.numerator) / x.denominator)
    return mp.mpc(x)


def _alpha_mp(alpha):
    if isinstance(alpha, int):
        return mp.mpf(alpha)
    alpha = Fraction(alpha)
    return mp.mpf(alpha.numerator) / alpha.denominator


def qpow(tp: TauPoint, alpha) -> ErrValue:
    """``q**alpha := exp(2 pi i alpha tau)`` for rational ``alpha``."""
    v = mp.exp(2j * mp.pi * _alpha_mp(alpha) * tp.tau)
    # the exponent is exact up to one rounding, whose effect is relative
    return ErrValue(v, _up(4 * mp.eps * abs(v) * (1 + abs(2 * mp.pi * _alpha_mp(alpha) * tp.tau))))


def unit_root(num, den) -> ErrValue:
    """``exp(2 pi i num/den)``."""
    v = mp.expjpi(2 * mp.mpf(num) / den)
    return ErrValue(v, _ulp_slack(v) * 4)


def geometric_tail_bound(ratio, first_term):
    """Upper bound ``first_term / (1 - ratio)`` on a geometric majorant."""
    if ratio < 0 or first_term < 0:
        raise DomainError("ratio and first_term must be nonnegative")
    if ratio >= 1:
        raise NonconvergenceError(f"majorant ratio {ratio} is not < 1")
    if isinstance(ratio, float) and isinstance(first_term, float):
        return first_term / (1.0 - ratio)
    return _up(mp.mpf(first_term) / (1 - mp.mpf(ratio)))
