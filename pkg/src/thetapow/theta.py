"""Theta functions, q-Pochhammer products and the identity registry.

All bilateral sums go through :func:`theta_series`, which sums

    sum_m z^m exp(2 pi i tau (K m^2/2 + a m))

over a window centred on the largest term and bounds both tails by geometric
majorants.  ``theta_q(x)`` is the case ``K=1, a=-1/2`` and ``vartheta_q(x)``
the case ``K=1, a=0``; rebased nomes such as ``vartheta_{q^K}(q^a)`` are
handled without forming ``q^K`` explicitly.
"""
from __future__ import annotations

import enum
import math
import random
from fractions import Fraction
from typing import Callable

import mpmath as mp

from .arith import (
    DomainError,
    ErrValue,
    NonconvergenceError,
    Precision,
    TauPoint,
    _prec,
    _up,
    as_errvalue,
    qpow,
    tau_from_q,
)

__all__ = [
    "IdentityId",
    "theta_series",
    "theta_eval",
    "vartheta_eval",
    "vartheta_rebased",
    "pochhammer_eval",
    "pochhammer_multi",
    "phi",
    "psi",
    "f_neg",
    "chi",
    "identity_residual",
    "identity_pairs",
    "sample_points",
    "entry30_product_sum_residual",
]

MAX_TERMS = 200_000


def _frac_mp(a) -> mp.mpf:
    if isinstance(a, int):
        return mp.mpf(a)
    a = Fraction(a)
    return mp.mpf(a.numerator) / a.denominator


def theta_series(tp: TauPoint, K, a=0, z=1, prec: Precision | None = None) -> ErrValue:
    """``sum_{m in Z} z^m exp(2 pi i tau (K m^2/2 + a m))`` with a tail bound.

    ``K > 0`` and ``a`` are rationals (or mp numbers); ``z`` is a nonzero
    complex number or an ErrValue, whose radius is propagated to first order.
    """
    return _bilateral(tp, [(K, a)], z, prec)


def _as_mp(v):
    if isinstance(v, (mp.mpf, mp.mpc, float, complex)):
        return v
    return _frac_mp(v)


def _bilateral(tp: TauPoint, parts, z=1, prec: Precision | None = None) -> ErrValue:
    """Σ_m z^m Π_i exp(2πiτ(K_i m²/2 + a_i m)), each factor evaluated separately.

    With a single part this is an ordinary theta series; several parts let a
    caller check an exponent identity termwise.
    """
    prec = _prec(prec)
    with prec.context():
        zv = as_errvalue(z)
        if zv.value == 0:
            raise DomainError("theta argument must be nonzero")
        parts = [(_as_mp(K), _as_mp(a)) for K, a in parts]
        Km = mp.fsum(K for K, _ in parts)
        am = mp.fsum(a for _, a in parts)
        if Km <= 0:
            raise DomainError("K must be positive")
        tau = tp.tau
        c = 2 * mp.pi * tau.imag
        logz = mp.log(zv.value)
        # |term| = exp(-(c (K m^2/2 + Re(a) m) - drift m)); Im(a) only shifts the drift
        drift = mp.re(logz) - 2 * mp.pi * tau.real * mp.im(am)
        are = mp.re(am)
        m0 = (drift / c - are) / Km

        def mag_log(m):
            return -(c * (Km * m * m / 2 + are * m) - drift * m)

        peak = max(mag_log(mp.floor(m0)), mag_log(mp.ceil(m0)))
        need = peak - (mp.log(prec.target) - 4)
        W = int(mp.ceil(mp.sqrt(2 * max(need, 1) / (c * Km)))) + 2
        if W > MAX_TERMS:
            raise NonconvergenceError(f"theta series needs {W} terms on each side")
        lo = int(mp.floor(m0)) - W
        hi = int(mp.ceil(m0)) + W
        two_pi_i_tau = 2j * mp.pi * tau
        terms = []
        absum = mp.mpf(0)
        dsum = mp.mpf(0)
        for m in range(lo, hi + 1):
            arg = m * logz
            spread = abs(arg)
            for K, a in parts:
                e = two_pi_i_tau * (K * m * m / 2 + a * m)
                arg += e
                spread += abs(e)
            v = mp.exp(arg)
            terms.append(v)
            av = abs(v)
            absum += av * (1 + spread)
            dsum += abs(m) * av
        total = mp.fsum(terms)
        # beyond the window successive term ratios keep shrinking
        tail = mp.mpf(0)
        for edge, step in ((hi, 1), (lo, -1)):
            nxt = edge + step
            r = mp.exp(mag_log(nxt + step) - mag_log(nxt))
            if r >= 1:
                raise NonconvergenceError("theta tail majorant does not decay")
            tail += mp.exp(mag_log(nxt)) / (1 - r)
        rad = tail + 8 * mp.eps * absum
        if zv.radius:
            rel = zv.radius / abs(zv.value)
            rad += 2 * dsum * rel * (1 + rel) ** (hi - lo)
        return ErrValue(total, _up(rad))


def theta_eval(q, x, prec: Precision | None = None) -> ErrValue:
    """θ_q(x) = Σ q^{m(m-1)/2} x^m.

    ``q`` may carry its own radius; it is propagated through a bound on
    ∂θ/∂q computed from the same majorant.
    """
    prec = _prec(prec)
    with prec.context():
        qv = as_errvalue(q)
        if abs(qv.value) + qv.radius >= 1:
            raise NonconvergenceError("theta_eval needs |q| < 1")
        if qv.value == 0:
            raise DomainError("theta_eval needs q != 0")
        tp = tau_from_q(qv.value, prec)
        val = theta_series(tp, 1, Fraction(-1, 2), x, prec)
        if qv.radius:
            val = ErrValue(val.value, val.radius + _dtheta_dq_bound(qv, as_errvalue(x)) * qv.radius)
        return val


def _dtheta_dq_bound(qv: ErrValue, xv: ErrValue) -> mp.mpf:
    # Σ |m(m-1)/2| (|q|+r)^{m(m-1)/2-1} (|x|+rx)^m over a generous window
    aq = abs(qv.value) + qv.radius
    ax = abs(xv.value) + xv.radius
    axi = 1 / max(abs(xv.value) - xv.radius, mp.mpf(10) ** (-mp.mp.dps))
    total = mp.mpf(0)
    m = 1
    while True:
        e = m * (m - 1) // 2
        tp_ = e * aq ** (e - 1) * ax ** m if e else 0
        e2 = m * (m + 1) // 2
        tn = e2 * aq ** (e2 - 1) * axi ** m
        total += tp_ + tn
        if m > 8 and tp_ + tn < mp.eps * total:
            break
        m += 1
        if m > 100_000:
            raise NonconvergenceError("derivative majorant does not decay")
    return total * 2


def vartheta_eval(tp: TauPoint, x, prec: Precision | None = None) -> ErrValue:
    """ϑ_q(x) = Σ q^{n²/2} x^n with q^{1/2} fixed by ``tp``."""
    return theta_series(tp, 1, 0, x, prec)


def vartheta_rebased(tp: TauPoint, K, a, z=1, prec: Precision | None = None) -> ErrValue:
    """ϑ_{q^K}(z q^a), the form every recurrence and closed formula uses."""
    return theta_series(tp, K, a, z, prec)


def pochhammer_eval(a, q, prec: Precision | None = None) -> ErrValue:
    """(a;q)_∞ with a bound on the neglected tail of the product."""
    prec = _prec(prec)
    with prec.context():
        av = as_errvalue(a)
        qv = as_errvalue(q)
        aq = abs(qv.value) + qv.radius
        if aq >= 1:
            raise NonconvergenceError("pochhammer_eval needs |q| < 1")
        target = prec.target / 16
        prod = mp.mpc(1)
        term = av.value
        n = 0
        absa = abs(av.value) + av.radius
        # log-derivative bound used for the input radii
        dlog_a = mp.mpf(0)
        dlog_q = mp.mpf(0)
        while True:
            mag = absa * aq ** n
            if n > 0 and mag < 0.5:
                L = mag / ((1 - aq) * (1 - mag))
                if L < target:
                    break
            f = 1 - term
            prod *= f
            if mag < 1:
                dlog_a += aq ** n / (1 - mag)
                dlog_q += n * absa * aq ** max(n - 1, 0) / (1 - mag)
            else:
                dlog_a += aq ** n / max(abs(f) - av.radius * aq ** n, mp.mpf(10) ** (-mp.mp.dps // 2))
                dlog_q += n * absa * aq ** max(n - 1, 0) / max(abs(f), mp.mpf(10) ** (-mp.mp.dps // 2))
            term *= qv.value
            n += 1
            if n > 10 * MAX_TERMS:
                raise NonconvergenceError("pochhammer product does not settle")
        ap = abs(prod)
        rad = ap * (mp.expm1(L) + 4 * (n + 2) * mp.eps)
        if av.radius or qv.radius:
            rad += ap * (dlog_a * av.radius + dlog_q * qv.radius) * 2
        if isinstance(av.value, mp.mpf) and isinstance(qv.value, mp.mpf):
            prod = prod.real
        return ErrValue(prod, _up(rad))


def pochhammer_multi(args, q, prec: Precision | None = None) -> ErrValue:
    """(a_1, ..., a_m; q)_∞ as a product of single symbols."""
    out = ErrValue(1)
    for a in args:
        out = out * pochhammer_eval(a, q, prec)
    return out


def phi(q, prec=None) -> ErrValue:
    qv = as_errvalue(q)
    return theta_eval(qv * qv, qv, prec)


def psi(q, prec=None) -> ErrValue:
    qv = as_errvalue(q)
    return theta_eval((qv * qv) * (qv * qv), qv, prec)


def f_neg(q, prec=None) -> ErrValue:
    """Ramanujan's f(-q) = θ_{q^3}(-q)."""
    qv = as_errvalue(q)
    return theta_eval(qv * qv * qv, -qv, prec)


def chi(q, prec=None) -> ErrValue:
    qv = as_errvalue(q)
    return pochhammer_eval(-qv, qv * qv, prec)


class IdentityId(enum.Enum):
    E18_1 = "E18.1"
    E18_2 = "E18.2"
    E18_3 = "E18.3"
    E18_4 = "E18.4"
    E19 = "E19"
    E22_1 = "E22.1"
    E22_2 = "E22.2"
    E22_3 = "E22.3"
    E28 = "E28"
    E29_1 = "E29.1"
    E29_2 = "E29.2"
    E30_1 = "E30.1"
    E30_2 = "E30.2"
    E30_3 = "E30.3"
    E30_4 = "E30.4"
    E30_5 = "E30.5"
    E30_6 = "E30.6"
    EQ_PREM = "EQ_PREM"
    COR22_a40 = "COR22_a40"
    COR22_a41 = "COR22_a41"
    COR22_a42 = "COR22_a42"
    COR22_a43 = "COR22_a43"
    EQ_C22 = "EQ_C22"
    EQ_C23 = "EQ_C23"
    RQ1_1 = "RQ1.1"
    RQ1_1b = "RQ1.1b"
    RQ1_2 = "RQ1.2"
    RQ1_3 = "RQ1.3"
    RQ1_4 = "RQ1.4"
    RQ1_5 = "RQ1.5"
    RQ1_6 = "RQ1.6"
    RQ1_7 = "RQ1.7"
    RQ1_8 = "RQ1.8"
    EQ_SPLIT = "EQ_SPLIT"

    @classmethod
    def parse(cls, name: str) -> "IdentityId":
        for member in cls:
            if name in (member.value, member.name):
                return member
        raise KeyError(f"unknown identity {name!r}")


Pair = tuple[ErrValue, ErrValue]


class _Ctx:
    """Shorthand evaluators bound to one sample point."""

    def __init__(self, tp: TauPoint, x, y, prec: Precision):
        self.tp = tp
        self.prec = prec
        self.q = qpow(tp, 1)
        self.x = as_errvalue(x)
        self.y = as_errvalue(y)

    def qp(self, alpha) -> ErrValue:
        return qpow(self.tp, alpha)

    def th(self, base_pow: int, arg) -> ErrValue:
        """θ_{q^base_pow}(arg), with the nome taken from tau."""
        return self.th_shift(base_pow, 0, arg)

    def th_shift(self, base_pow: int, shift, arg=1) -> ErrValue:
        """θ_{q^K}(q^shift * arg) summed directly in tau (no rounding of q^shift)."""
        # θ_{Q}(Q^s z) with Q=q^K: Σ q^{K m(m-1)/2 + shift m} z^m
        return theta_series(self.tp, base_pow, Fraction(shift) - Fraction(base_pow, 2), arg, self.prec)

    def vt(self, K, a=0, z=1) -> ErrValue:
        return theta_series(self.tp, K, a, z, self.prec)

    def poch(self, a, base) -> ErrValue:
        return pochhammer_eval(a, base, self.prec)


def _gamma_series_value(k: int, n: int, q: ErrValue, prec) -> ErrValue:
    from .coeffs import CoeffKey, gamma_eval

    return gamma_eval(CoeffKey(k, n), q, prec)


def _pairs_E18_1(c: _Ctx):
    return [(c.th(1, c.x), c.th(1, c.q / c.x))]


def _pairs_E18_2(c: _Ctx):
    lhs = c.th_shift(1, 1)
    return [(lhs, 2 * c.th_shift(4, 1)), (lhs, 2 * c.th_shift(4, 3))]


def _pairs_E18_3(c: _Ctx):
    zero = ErrValue(0)
    return [(c.th(1, -1), zero), (c.th_shift(1, 1, -1), zero)]


def _pairs_E18_4(c: _Ctx):
    out = []
    for n in range(-3, 4):
        rhs = c.qp(Fraction(n * (n - 1), 2)) * (c.x ** n) * c.th_shift(1, n, c.x)
        out.append((c.th(1, c.x), rhs))
    return out


def _pairs_E19(c: _Ctx):
    rhs = c.poch(c.q, c.q) * c.poch(-c.x, c.q) * c.poch(-c.q / c.x, c.q)
    return [(c.th(1, c.x), rhs)]


def _pairs_E22_1(c: _Ctx):
    q, q2 = c.q, c.qp(2)
    lhs = c.th_shift(2, 1)
    direct = c.vt(2, 0)  # Σ q^{k^2}
    prod = c.poch(-q, q2) * c.poch(q2, q2) / (c.poch(q, q2) * c.poch(-q2, q2))
    return [(lhs, direct), (lhs, prod)]


def _pairs_E22_2(c: _Ctx):
    q, q2 = c.q, c.qp(2)
    lhs = c.th_shift(4, 1)
    with c.prec.context():
        tri = mp.mpc(0)
        k = 0
        qv = q.value
        while True:
            term = qv ** (k * (k + 1) // 2)
            tri += term
            if k > 2 and abs(term) < c.prec.target * mp.mpf(10) ** -4:
                break
            k += 1
        aq = abs(qv)
        tail = aq ** ((k + 1) * (k + 2) // 2) / (1 - aq ** (k + 2))
        direct = ErrValue(tri, _up(tail + 8 * (k + 2) * mp.eps * k * k))
    return [(lhs, direct), (lhs, c.poch(q2, q2) / c.poch(q, q2))]


def _pairs_E22_3(c: _Ctx):
    lhs = c.th_shift(3, 1, -1)
    # Σ (-1)^k q^{k(3k-1)/2}: θ with nome q^3 at -q, summed as K=3, a=-1/2 with z=-1
    direct = c.vt(3, Fraction(-1, 2), -1)
    return [(lhs, direct), (lhs, c.poch(c.q, c.q))]


def _pairs_E28(c: _Ctx):
    out = []
    for n in (1, 2, 3, 4):
        lhs = ErrValue(1)
        for k in range(n):
            lhs = lhs * c.th_shift(n, k, c.x)
        qn = c.qp(n)
        rhs = c.poch(qn, qn) ** n / c.poch(c.q, c.q) * c.th(1, c.x)
        out.append((lhs, rhs))
    return out


def _pairs_E29_1(c: _Ctx):
    x, y = c.x, c.y
    lhs = c.th(1, x) * c.th(1, y) + c.th(1, -x) * c.th(1, -y)
    rhs = 2 * c.th(2, x * y) * c.th_shift(2, 1, y / x)
    return [(lhs, rhs)]


def _pairs_E29_2(c: _Ctx):
    x, y = c.x, c.y
    lhs = c.th(1, x) * c.th(1, y) - c.th(1, -x) * c.th(1, -y)
    rhs = 2 * x * c.th_shift(2, 1, x * y) * c.th(2, y / x)
    return [(lhs, rhs)]


def _pairs_E30(item: int):
    def build(c: _Ctx):
        x = c.x
        x2 = x * x
        if item == 1:
            return [(c.th(2, x) * c.th_shift(2, 1, x), c.th(1, x) * psi(c.q, c.prec))]
        if item == 2:
            return [(c.th(1, x) + c.th(1, -x), 2 * c.th_shift(4, 1, x2))]
        if item == 3:
            return [(c.th(1, x) - c.th(1, -x), 2 * x * c.th_shift(4, 3, x2))]
        if item == 4:
            return [(c.th(1, x) * c.th(1, -x), c.th(2, -x2) * phi(-c.q, c.prec))]
        if item == 5:
            return [(c.th(1, x) ** 2 + c.th(1, -x) ** 2, 2 * c.th(2, x2) * phi(c.q, c.prec))]
        if item == 6:
            return [(c.th(1, x) ** 2 - c.th(1, -x) ** 2, 4 * x * c.th_shift(2, 1, x2) * psi(c.qp(2), c.prec))]
        raise AssertionError(item)

    return build


def _pairs_EQ_PREM(c: _Ctx):
    x = c.x
    x2 = x * x
    rhs = c.th_shift(2, 1) * c.th(2, x2) + x * c.th(2, 1) * c.th_shift(2, 1, x2)
    return [(c.th(1, x) ** 2, rhs)]


def _a4_closed(c: _Ctx, i: int) -> ErrValue:
    t2_0 = c.th(2, 1)
    t2_1 = c.th_shift(2, 1)
    if i == 0:
        return t2_1 ** 2 * c.th_shift(4, 2) + c.q * t2_0 ** 2 * c.th(4, 1)
    if i == 1:
        return 2 * t2_0 * t2_1 * c.th_shift(4, 3)
    if i == 2:
        return t2_1 ** 2 * c.th(4, 1) + t2_0 ** 2 * c.th_shift(4, 2)
    if i == 3:
        return 2 * t2_0 * t2_1 * c.th_shift(4, 1)
    raise DomainError(i)


def _pairs_COR22(i: int):
    def build(c: _Ctx):
        closed = _a4_closed(c, i)
        pairs = [(closed, _gamma_series_value(4, i, c.q, c.prec))]
        if i in (1, 3):
            pairs.append((closed, c.th(1, 1) ** 3 / 2))
        return pairs

    return build


def _pairs_EQ_C22(c: _Ctx):
    sq = c.qp(Fraction(1, 2))
    return [(c.vt(1, 0, sq) ** 2, 2 * c.vt(2, 0) * c.vt(2, 1))]


def _pairs_EQ_C23(c: _Ctx):
    q2 = c.qp(2)
    sq = c.qp(Fraction(1, 2))
    return [(c.vt(1, 0, sq), 2 * c.poch(q2, q2) ** 2 / c.poch(c.q, c.q))]


def _pairs_RQ1_1(c: _Ctx):
    return [(c.vt(1, 0, 1 / c.x), c.vt(1, 0, c.x))]


def _pairs_RQ1_1b(c: _Ctx):
    out = []
    base = c.vt(1, 0, c.x)
    for n in range(-3, 4):
        lhs = c.vt(1, n, c.x)  # ϑ(q^n x)
        rhs = c.qp(Fraction(-n * n, 2)) * c.x ** (-n) * base
        out.append((lhs, rhs))
    return out


def _pairs_RQ1_2(c: _Ctx):
    sq = c.qp(Fraction(1, 2))
    rhs = pochhammer_multi([c.q, -sq * c.x, -sq / c.x], c.q, c.prec)
    return [(c.vt(1, 0, c.x), rhs)]


def _pairs_RQ1_3(c: _Ctx):
    zero = ErrValue(0)
    return [(c.vt(1, Fraction(2 * j + 1, 2), -1), zero) for j in range(-2, 3)]


def _split_pair(c: _Ctx, k: int, x) -> Pair:
    lhs = ErrValue(1)
    for n in range(k):
        lhs = lhs * c.vt(k, n, x)
    qk = c.qp(k)
    rhs = c.poch(qk, qk) ** k / c.poch(c.q, c.q) * c.vt(1, Fraction(k - 1, 2), x)
    return lhs, rhs


def _pairs_RQ1_4(c: _Ctx):
    return [_split_pair(c, k, c.x) for k in (1, 2, 3, 4)]


def _pairs_RQ1_5(c: _Ctx):
    out = []
    for k, m in ((1, 1), (1, 2), (2, 1)):
        # coefficients of ϑ_{q^m} times the B_{q^k} weights, multiplied term by term
        lhs = _bilateral(c.tp, [(m, 0), (k, 0)], c.x, c.prec)
        out.append((lhs, c.vt(k + m, 0, c.x)))
    return out


def _pairs_RQ1_6(c: _Ctx):
    out = []
    for m in (1, 2):
        for n in (-1, 1, 2):
            # x^n ϑ_{q^m} has coefficient q^{m j^2/2} at x^{j+n}; B multiplies it by q^{(j+n)^2/2}
            lhs = c.qp(Fraction(n * n, 2)) * c.x ** n * _bilateral(c.tp, [(m, 0), (1, n)], c.x, c.prec)
            rhs = c.qp(Fraction(n * n, 2)) * c.x ** n * c.vt(m + 1, n, c.x)
            out.append((lhs, rhs))
    return out


def _pairs_RQ1_7(c: _Ctx):
    out = []
    a = ErrValue.exact(mp.mpc("0.7", "0.2"))
    for m in (1, 2):
        lhs = c.vt(m + 1, 0, a * c.x)  # σ_a B ϑ_{q^m}
        rhs = _bilateral(c.tp, [(m, 0), (1, 0)], a * c.x, c.prec)  # B σ_a ϑ_{q^m}
        out.append((lhs, rhs))
    return out


def _pairs_RQ1_8(c: _Ctx):
    out = []
    for k, m in ((2, 1), (3, 1), (2, 2)):
        # B_q applied to ϑ_{q^m}(x^k): weight q^{(kj)^2/2} on the x^{kj} coefficient
        lhs = _bilateral(c.tp, [(m, 0), (k * k, 0)], c.x ** k, c.prec)
        rhs = c.vt(m + k * k, 0, c.x ** k)
        out.append((lhs, rhs))
    return out


def _pairs_EQ_SPLIT(c: _Ctx):
    return [_split_pair(c, 2, 1)]


_REGISTRY: dict[IdentityId, Callable[[_Ctx], list[Pair]]] = {
    IdentityId.E18_1: _pairs_E18_1,
    IdentityId.E18_2: _pairs_E18_2,
    IdentityId.E18_3: _pairs_E18_3,
    IdentityId.E18_4: _pairs_E18_4,
    IdentityId.E19: _pairs_E19,
    IdentityId.E22_1: _pairs_E22_1,
    IdentityId.E22_2: _pairs_E22_2,
    IdentityId.E22_3: _pairs_E22_3,
    IdentityId.E28: _pairs_E28,
    IdentityId.E29_1: _pairs_E29_1,
    IdentityId.E29_2: _pairs_E29_2,
    IdentityId.E30_1: _pairs_E30(1),
    IdentityId.E30_2: _pairs_E30(2),
    IdentityId.E30_3: _pairs_E30(3),
    IdentityId.E30_4: _pairs_E30(4),
    IdentityId.E30_5: _pairs_E30(5),
    IdentityId.E30_6: _pairs_E30(6),
    IdentityId.EQ_PREM: _pairs_EQ_PREM,
    IdentityId.COR22_a40: _pairs_COR22(0),
    IdentityId.COR22_a41: _pairs_COR22(1),
    IdentityId.COR22_a42: _pairs_COR22(2),
    IdentityId.COR22_a43: _pairs_COR22(3),
    IdentityId.EQ_C22: _pairs_EQ_C22,
    IdentityId.EQ_C23: _pairs_EQ_C23,
    IdentityId.RQ1_1: _pairs_RQ1_1,
    IdentityId.RQ1_1b: _pairs_RQ1_1b,
    IdentityId.RQ1_2: _pairs_RQ1_2,
    IdentityId.RQ1_3: _pairs_RQ1_3,
    IdentityId.RQ1_4: _pairs_RQ1_4,
    IdentityId.RQ1_5: _pairs_RQ1_5,
    IdentityId.RQ1_6: _pairs_RQ1_6,
    IdentityId.RQ1_7: _pairs_RQ1_7,
    IdentityId.RQ1_8: _pairs_RQ1_8,
    IdentityId.EQ_SPLIT: _pairs_EQ_SPLIT,
}


def _default_y(x: ErrValue) -> ErrValue:
    return x * ErrValue.exact(mp.mpc(mp.cos(1), mp.sin(1)) * mp.mpf("1.3"))


def identity_pairs(id: IdentityId | str, tp: TauPoint, x=1, prec: Precision | None = None, y=None) -> list[Pair]:
    """Every (lhs, rhs) instance an identity contributes at one sample point."""
    if isinstance(id, str):
        id = IdentityId.parse(id)
    if id not in _REGISTRY:
        raise KeyError(f"unknown identity {id!r}")
    prec = _prec(prec)
    with prec.context():
        xv = as_errvalue(x)
        if xv.value == 0:
            raise DomainError("identity sample point needs x != 0")
        yv = _default_y(xv) if y is None else as_errvalue(y)
        return _REGISTRY[id](_Ctx(tp, xv, yv, prec))


def identity_residual(id: IdentityId | str, tp: TauPoint, x=1, prec: Precision | None = None, y=None) -> ErrValue:
    """LHS - RHS for the worst instance of ``id`` at (tp, x).

    The identity holds at the point when ``|value| <= radius``.  Identities
    with an integer side parameter (E18_4, E28, the quasi-periodicity and
    split items) are checked for several parameter values and the instance
    with the largest excess is returned.
    """
    prec = _prec(prec)
    with prec.context():
        worst = None
        worst_excess = None
        for lhs, rhs in identity_pairs(id, tp, x, prec, y):
            d = lhs - rhs
            excess = abs(d.value) - d.radius
            if worst is None or excess > worst_excess:
                worst, worst_excess = d, excess
        return worst


def entry30_product_sum_residual(tp: TauPoint, x, y, n, prec: Precision | None = None) -> ErrValue:
    """Residual of the four-factor theta product sum with a scaling argument ``n``.

    Kept outside :class:`IdentityId`: numerically it does not hold for a
    generic third argument ``n`` (see ``tests/test_theta.py``).
    """
    prec = _prec(prec)
    with prec.context():
        c = _Ctx(tp, x, y, prec)
        xv, yv, nv = c.x, c.y, as_errvalue(n)
        th = lambda z: c.th(1, z)
        lhs = th(xv) * th(yv) * th(nv * xv) * th(nv * yv) + th(-xv) * th(-yv) * th(-nv * xv) * th(-nv * yv)
        rhs = 2 * xv * th(yv / xv) * th(nv * xv * yv) * th(nv) * psi(c.q, prec)
        return lhs - rhs


def sample_points(count: int, seed: int = 0x5EED, q_range=(0.05, 0.6), x_range=(0.3, 3.0)):
    """Deterministic (TauPoint, x) samples with |q| and |x| in the given ranges.

    ``tau = u + i t`` with ``u`` uniform on [0, 1) and ``t`` chosen so that
    ``|q| = exp(-2 pi t)`` is uniform on ``q_range``; ``|x|`` is log-uniform.
    """
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        aq = rng.uniform(*q_range)
        t = -math.log(aq) / (2 * math.pi)
        u = rng.random()
        ax = math.exp(rng.uniform(math.log(x_range[0]), math.log(x_range[1])))
        arg = rng.uniform(-math.pi, math.pi)
        tp = TauPoint(mp.mpc(u, t))
        x = mp.mpc(ax * math.cos(arg), ax * math.sin(arg))
        out.append((tp, x))
    return out
