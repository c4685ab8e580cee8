"""Exact modular representation of γ_{k,n} on the negative real axis.

Write ``q = exp(pi i - 2 pi t)``.  The transformation ``tau -> -tau/(2 tau - 1)``
turns every theta value into a rapidly convergent Gaussian sum in ``1/t``:

    γ_{k,n}(q) = e^{πi(k-2n)/4} e^{-πt n(n-k)/k} (2t)^{-k/2} S_{k,n} / (k ϑ_{q^k}(1)),
    S_{k,n}   = Σ_{α ∈ Λ_{k,n}} s_α^k,
    s_α       = Σ_m exp(-πi m(m/2 + n/k) - π(α+m)^2/(4t)),

with Λ_{k,n} = {i/k : -k < i <= k, i ≡ n mod 2}.  The denominator has an
exact transform for each class of k mod 4.  Every Gaussian sum here is
evaluated with a tail bound and with the t-derivative needed to carry an
input radius on t.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .arith import DomainError, ErrValue, NonconvergenceError, Precision, _prec, _up, as_errvalue

__all__ = [
    "ModularPoint",
    "lambda_system",
    "gauss_sum",
    "s_alpha_modular",
    "S_kn_eval",
    "theta_qk_one",
    "theta_qk_one_asymptote",
    "gamma_modular_eval",
]


@dataclass(frozen=True)
class ModularPoint:
    """``tau = 1/2 + i t`` together with its image ``tau' = -1/2 + i/(4t)``."""

    t: mp.mpf
    t_radius: mp.mpf = mp.mpf(0)

    def __post_init__(self):
        t = mp.mpf(self.t)
        if t <= 0:
            raise DomainError("t must be positive")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "t_radius", mp.mpf(self.t_radius))

    @classmethod
    def from_q(cls, q, prec: Precision | None = None) -> "ModularPoint":
        prec = _prec(prec)
        with prec.context():
            qv = as_errvalue(q)
            v = mp.re(qv.value)
            if mp.im(qv.value) != 0 or not -1 < v < 0:
                raise DomainError("ModularPoint needs real q in (-1, 0)")
            t = -mp.log(-v) / (2 * mp.pi)
            dt = qv.radius / (2 * mp.pi * (abs(v) - qv.radius)) + 4 * mp.eps * (t + 1)
            return cls(t, _up(dt))

    @property
    def tau(self) -> mp.mpc:
        return mp.mpc(mp.mpf(1) / 2, self.t)

    @property
    def tau_prime(self) -> mp.mpc:
        return mp.mpc(-mp.mpf(1) / 2, 1 / (4 * self.t))

    @property
    def q(self) -> mp.mpf:
        return -mp.exp(-2 * mp.pi * self.t)

    @property
    def q_prime(self) -> mp.mpf:
        return -mp.exp(-mp.pi / (2 * self.t))


def lambda_system(k: int, n: int) -> list[Fraction]:
    """Λ_{k,n}: k representatives of (2j+n)/k modulo 2."""
    return [Fraction(i, k) for i in range(-k + 1, k + 1) if (i - n) % 2 == 0]


def gauss_sum(alpha, C, mpt: ModularPoint, phase=None, prec: Precision | None = None) -> ErrValue:
    """Σ_m ph(m) exp(-π(α+m)²/(C t)) with |ph(m)| = 1.

    The radius covers truncation, rounding and the radius carried by t.
    """
    prec = _prec(prec)
    with prec.context():
        t = mpt.t
        a = mp.mpf(alpha.numerator) / alpha.denominator if isinstance(alpha, Fraction) else mp.mpf(alpha)
        w = mp.pi / (C * t)
        # the largest term sits at the integer nearest -alpha; the window is
        # sized so the tail is below target relative to that term
        d0 = abs(a - mp.nint(a))
        L = -mp.log(prec.target) + 8
        R = mp.sqrt(d0 * d0 + L / w) + 1
        lo = int(mp.floor(-a - R))
        hi = int(mp.ceil(-a + R))
        total = mp.mpc(0)
        absum = mp.mpf(0)
        dsum = mp.mpf(0)
        for m in range(lo, hi + 1):
            d2 = (a + m) ** 2
            mag = mp.exp(-w * d2)
            v = mag if phase is None else phase(m) * mag
            total += v
            absum += mag * (1 + w * d2)
            dsum += mag * w * d2 / t
        # both tails start at distance >= R from -alpha and decay faster than geometrically
        edge = w * (R - 1) ** 2 if R > 1 else mp.mpf(0)
        ratio = mp.exp(-w * (2 * (R - 1) + 1))
        if ratio >= 1:
            raise NonconvergenceError("Gaussian tail does not decay")
        tail = 2 * mp.exp(-edge) / (1 - ratio)
        rad = tail + 8 * (hi - lo + 2) * mp.eps * absum + dsum * mpt.t_radius * 2
        if phase is None:
            total = total.real
        return ErrValue(total, _up(rad))


def s_alpha_modular(mpt: ModularPoint, k: int, n: int, alpha, prec: Precision | None = None) -> ErrValue:
    """s_α = Σ_m e^{-πi m(m/2 + n/k)} e^{-π(α+m)²/(4t)}."""
    prec = _prec(prec)
    with prec.context():
        r = Fraction(n, k)

        def phase(m):
            # exponent -m(m/2 + n/k) is rational; reduce mod 2 before calling expjpi
            e = -(Fraction(m * m, 2) + m * r)
            e = e - 2 * (e.numerator // (2 * e.denominator))
            return mp.expjpi(mp.mpf(e.numerator) / e.denominator)

        return gauss_sum(Fraction(alpha), 4, mpt, phase, prec)


def S_kn_eval(mpt: ModularPoint, k: int, n: int, prec: Precision | None = None) -> ErrValue:
    """S_{k,n} = Σ_{α ∈ Λ_{k,n}} s_α^k."""
    if k < 1 or not 0 <= n < k:
        raise DomainError("need k >= 1 and 0 <= n < k")
    prec = _prec(prec)
    with prec.context():
        out = ErrValue(0)
        for a in lambda_system(k, n):
            out = out + s_alpha_modular(mpt, k, n, a, prec) ** k
        return out


def _t_power(mpt: ModularPoint, p, scale=1) -> ErrValue:
    """(scale·t)^p with the first-order radius from t."""
    v = (scale * mpt.t) ** p
    return ErrValue(v, _up(abs(v) * (abs(p) * mpt.t_radius / mpt.t * mp.mpf("1.01") + 4 * mp.eps)))


def theta_qk_one(mpt: ModularPoint, k: int, prec: Precision | None = None) -> ErrValue:
    """ϑ_{q^k}(1) at q = e^{πi-2πt}, through its exact modular transform."""
    if k < 1:
        raise DomainError("k must be positive")
    prec = _prec(prec)
    with prec.context():
        r = k % 4
        if r == 0:
            return _t_power(mpt, mp.mpf(-1) / 2, k) * gauss_sum(Fraction(0), k, mpt, None, prec)
        if r == 2:
            return _t_power(mpt, mp.mpf(-1) / 2, k) * gauss_sum(Fraction(1, 2), k, mpt, None, prec)

        def phase(m):
            return mp.expjpi(-mp.mpf((m * m) % 4) / 2)

        g = gauss_sum(Fraction(0), 4 * k, mpt, phase, prec)
        val = ErrValue(mp.expjpi(mp.mpf(1) / 4), 4 * mp.eps) * _t_power(mpt, mp.mpf(-1) / 2, 2 * k) * g
        return val if r == 1 else val.conjugate()


def theta_qk_one_asymptote(k: int, t, as_printed: bool = False) -> mp.mpc:
    """Leading term of ϑ_{q^k}(1) as t -> 0+.

    For k ≡ 2 mod 4 the exponential factor is e^{-π/(4kt)}; ``as_printed``
    substitutes e^{-1/(4kt)} instead.
    """
    t = mp.mpf(t)
    r = k % 4
    if r == 0:
        return mp.mpc(1 / mp.sqrt(k * t))
    if r == 2:
        expo = 1 if as_printed else mp.pi
        return mp.mpc(2 / mp.sqrt(k * t) * mp.exp(-expo / (4 * k * t)))
    ph = mp.expjpi(mp.mpf(1) / 4 if r == 1 else -mp.mpf(1) / 4)
    return ph / mp.sqrt(2 * k * t)


def gamma_modular_eval(k: int, n: int, q, prec: Precision | None = None) -> ErrValue:
    """γ_{k,n}(q) for real q in (-1, 0) from the modular representation."""
    if not 0 <= n < k:
        raise DomainError("need 0 <= n < k")
    prec = _prec(prec)
    with prec.context():
        mpt = q if isinstance(q, ModularPoint) else ModularPoint.from_q(q, prec)
        if (k, n) == (2, 0):
            # γ_{2,0} = ϑ_{q^2}(1); the Λ-sum cancels to e^{-π/(8t)} here, the direct transform does not
            v = theta_qk_one(mpt, 2, prec)
            return ErrValue(mp.re(v.value), v.radius)
        t = mpt.t
        pref_phase = ErrValue(mp.expjpi(mp.mpf(k - 2 * n) / 4), 4 * mp.eps)
        lin = mp.pi * n * (n - k) / k
        expo_v = mp.exp(-lin * t)
        expo = ErrValue(expo_v, _up(expo_v * (abs(lin) * mpt.t_radius * mp.mpf("1.01") + 4 * mp.eps)))
        scale = _t_power(mpt, -mp.mpf(k) / 2, 2)
        S = S_kn_eval(mpt, k, n, prec)
        den = theta_qk_one(mpt, k, prec)
        val = pref_phase * expo * scale * S / (k * den)
        # γ is real for real q; the imaginary part is pure rounding
        imag_excess = abs(mp.im(val.value))
        return ErrValue(mp.re(val.value), _up(val.radius + imag_excess))
