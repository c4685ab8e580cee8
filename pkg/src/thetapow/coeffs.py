"""Coefficients γ_{k,n}(q) of θ_q(x)^k and c_{k,n}(q) of ϑ_q(x)^k.

Exact integer series come from a dynamic programme over the number of theta
factors.  The state after ``j`` factors is the ``j`` series γ_{j,0..j-1};
every other index is folded back by quasi-periodicity,

    γ_{j, aj+i} = q^{j a(a-1)/2 + i a} γ_{j,i},

so one step costs O(j · m_max · N) integer additions.  Numerical values use
the series with a rigorous tail when the needed order is moderate and switch
to the modular or root-of-unity representation when it is not.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product as _iproduct

import mpmath as mp
import numpy as np

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
    tau_from_negative_real,
    tau_from_q,
)
from .theta import theta_series

__all__ = [
    "CoeffKey",
    "IntSeries",
    "ScaleError",
    "m_max",
    "gamma_series_dp",
    "gamma_series",
    "gamma_series_oracle",
    "convolution_series",
    "coefficient_majorant_order",
    "gamma_eval",
    "c_eval",
    "c_recurrence_eval",
    "c_closed_eval",
    "closed_form_variants",
    "c_rootsum_eval",
    "squaring_step",
]

SERIES_BUDGET = 1500
_INT64_LIMIT = 2 ** 62


class ScaleError(ValueError):
    """Requested size exceeds what an enumeration routine accepts."""


@dataclass(frozen=True)
class CoeffKey:
    k: int
    n: int

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise DomainError(f"k must be a positive integer, got {self.k}")
        if int(self.n) != self.n:
            raise DomainError(f"n must be an integer, got {self.n}")

    def reduce(self) -> tuple[int, int]:
        """(i, e) with 0 <= i < k and γ_{k,n} = q^e γ_{k,i}."""
        j, i = divmod(self.n, self.k)
        return i, self.k * j * (j - 1) // 2 + i * j


@dataclass(frozen=True)
class IntSeries:
    """Truncated power series Σ_{m<=order} coeffs[m] q^m with integer coefficients."""

    coeffs: tuple
    order: int

    def __post_init__(self):
        if len(self.coeffs) != self.order + 1:
            raise ValueError("coeffs must have order+1 entries")

    @classmethod
    def from_array(cls, arr) -> "IntSeries":
        return cls(tuple(int(v) for v in arr), len(arr) - 1)

    def __getitem__(self, m):
        return self.coeffs[m]

    def __len__(self):
        return len(self.coeffs)

    def shifted(self, e: int) -> "IntSeries":
        """q^e times the series, keeping the same order."""
        if e < 0:
            raise ValueError("shift must be nonnegative")
        c = (0,) * min(e, self.order + 1) + self.coeffs[: max(self.order + 1 - e, 0)]
        return IntSeries(c, self.order)

    def truncate(self, order: int) -> "IntSeries":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return IntSeries(self.coeffs[: order + 1], order)

    def as_poly_string(self, var: str = "q") -> str:
        parts = []
        for m, c in enumerate(self.coeffs):
            if c:
                parts.append(f"{c}" if m == 0 else f"{c}{var}^{m}" if m > 1 else f"{c}{var}")
        return " + ".join(parts) if parts else "0"


def m_max(N: int) -> int:
    return 1 + math.isqrt(2 * N) + (0 if math.isqrt(2 * N) ** 2 == 2 * N else 1)


def _dtype_for(k: int, N: int):
    return np.int64 if (2 * m_max(N) + 1) ** k < _INT64_LIMIT else object


_DP_CACHE: dict[int, tuple[int, np.ndarray]] = {}


def _dp_table(k: int, N: int) -> np.ndarray:
    """Array of shape (k, N+1): row i holds the coefficients of γ_{k,i}."""
    hit = _DP_CACHE.get(k)
    if hit is not None and hit[0] >= N:
        return hit[1][:, : N + 1]
    dtype = _dtype_for(k, N)
    mm = m_max(N)
    steps = [(m, m * (m - 1) // 2) for m in range(-mm, mm + 1) if m * (m - 1) // 2 <= N]
    table = np.zeros((1, N + 1), dtype=dtype)
    table[0, 0] = 1
    for j in range(1, k):
        nxt = np.zeros((j + 1, N + 1), dtype=dtype)
        for s in range(j + 1):
            acc = nxt[s]
            for m, em in steps:
                a, i = divmod(s - m, j)
                e = em + j * a * (a - 1) // 2 + i * a
                if e > N:
                    continue
                acc[e:] += table[i, : N + 1 - e]
        table = nxt
    _DP_CACHE[k] = (N, table)
    return table


def gamma_series_dp(key: CoeffKey, N: int) -> IntSeries:
    """Exact series of γ_{k,n} to order N for 0 <= n < k."""
    if not 0 <= key.n < key.k:
        raise DomainError(f"gamma_series_dp needs 0 <= n < k, got n={key.n}, k={key.k}; reduce first")
    if N < 0:
        raise DomainError("order must be nonnegative")
    return IntSeries.from_array(_dp_table(key.k, N)[key.n])


def gamma_series(key: CoeffKey, N: int) -> IntSeries:
    """Exact series of γ_{k,n} for any integer n, via the index reduction."""
    i, e = key.reduce()
    return gamma_series_dp(CoeffKey(key.k, i), N).shifted(e) if e <= N else IntSeries((0,) * (N + 1), N)


def gamma_series_oracle(key: CoeffKey, N: int) -> IntSeries:
    """γ_{k,n} by enumerating integer tuples directly (small k and N only).

    The first k-1 entries are enumerated with the exponent pruned at N; the
    last entry is forced by the index sum.
    """
    k, n = key.k, key.n
    if k > 6 or N > 60:
        raise ScaleError("oracle limited to k <= 6 and N <= 60")
    mm = m_max(N)
    rng = np.arange(-mm, mm + 1, dtype=np.int64)
    tri = rng * (rng - 1) // 2
    sums = np.zeros(1, dtype=np.int64)
    exps = np.zeros(1, dtype=np.int64)
    for _ in range(k - 1):
        s = (sums[:, None] + rng[None, :]).ravel()
        e = (exps[:, None] + tri[None, :]).ravel()
        keep = e <= N
        sums, exps = s[keep], e[keep]
    last = n - sums
    total = exps + last * (last - 1) // 2
    keep = total <= N
    counts = np.bincount(total[keep], minlength=N + 1)[: N + 1]
    return IntSeries.from_array(counts)


def convolution_series(k: int, n: int, N: int) -> IntSeries:
    """Σ_m γ_{n,m} γ_{k-n,m} truncated at order N, for 1 <= n <= k-1."""
    if not 1 <= n <= k - 1:
        raise DomainError("need 1 <= n <= k-1")
    bound = 2 + math.isqrt(2 * N) + 1
    acc = np.zeros(N + 1, dtype=object)
    for m in range(-bound, bound + 1):
        a = np.array(gamma_series(CoeffKey(n, m), N).coeffs, dtype=object)
        b = np.array(gamma_series(CoeffKey(k - n, m), N).coeffs, dtype=object)
        acc += np.convolve(a, b)[: N + 1]
    return IntSeries.from_array(acc)


def _log_majorant(k: int, m: int, log_abs_q: float) -> float:
    return k * math.log(2 * math.sqrt(2 * m) + 5) + m * log_abs_q


def coefficient_majorant_order(k: int, abs_q: float, digits: int) -> int:
    """Smallest N whose coefficient-count tail bound is below 10^-digits."""
    if not 0 < abs_q < 1:
        raise NonconvergenceError("need 0 < |q| < 1")
    lq = math.log(abs_q)
    goal = -digits * math.log(10) - 2
    N = 1
    while True:
        t1 = _log_majorant(k, N + 1, lq)
        r = math.exp(_log_majorant(k, N + 2, lq) - t1)
        if r < 1 and t1 - math.log1p(-r) < goal:
            return N
        N = int(N * 1.25) + 1
        if N > 10 ** 8:
            raise NonconvergenceError("series order would exceed 1e8")


def _tail_bound(k: int, N: int, abs_q) -> mp.mpf:
    def T(m):
        return (2 * mp.sqrt(2 * m) + 5) ** k * abs_q ** m

    t1 = T(N + 1)
    r = T(N + 2) / t1
    if r >= 1:
        raise NonconvergenceError(f"majorant ratio {mp.nstr(r, 5)} is not < 1 at order {N}")
    return t1 / (1 - r)


def _eval_series(series: IntSeries, qv: ErrValue, k: int) -> ErrValue:
    """Horner evaluation with tail, rounding and input-radius terms."""
    coeffs = series.coeffs
    N = series.order
    val = mp.polyval(list(reversed([mp.mpf(c) for c in coeffs])), qv.value) if N else mp.mpf(coeffs[0])
    aq = abs(qv.value)
    aq_hi = aq + qv.radius
    fq = float(aq_hi)
    # Σ|c_m||q|^m and Σ m|c_m||q|^{m-1}, in floats with a 1% safety factor
    absum = 0.0
    dsum = 0.0
    p = 1.0
    for m, c in enumerate(coeffs):
        if c:
            absum += float(c) * p
            if m:
                dsum += m * float(c) * p / fq
        p *= fq
    tail = _tail_bound(k, N, aq_hi)
    rad = tail + 4 * (N + 2) * mp.eps * mp.mpf(absum) * mp.mpf("1.01")
    if qv.radius:
        rad += mp.mpf(dsum) * mp.mpf("1.01") * qv.radius
    return ErrValue(val, _up(rad))


def _is_negative_real(qv: ErrValue) -> bool:
    v = qv.value
    return (isinstance(v, mp.mpf) or v.imag == 0) and mp.re(v) < 0


def gamma_eval(key: CoeffKey, q, prec: Precision | None = None, N: int | None = None, route: str = "auto") -> ErrValue:
    """Numerical γ_{k,n}(q) with a certified radius.

    ``route`` is ``"series"``, ``"modular"`` (real negative q only),
    ``"rootsum"`` or ``"auto"``.  In auto mode the series is used while the
    order needed for the requested precision stays under ``SERIES_BUDGET``.
    """
    prec = _prec(prec)
    with prec.context():
        qv = as_errvalue(q)
        if abs(qv.value) + qv.radius >= 1:
            raise NonconvergenceError("gamma_eval needs |q| + radius < 1")
        i, e = key.reduce()
        if qv.value == 0:
            base = ErrValue(math.comb(key.k, i))
            return base if e == 0 else ErrValue(0)
        base_key = CoeffKey(key.k, i)
        if route == "auto":
            if N is not None:
                route = "series"
            else:
                need = coefficient_majorant_order(key.k, float(abs(qv.value) + qv.radius), prec.working_dps - 4)
                if need <= SERIES_BUDGET:
                    route, N = "series", need
                elif _is_negative_real(qv):
                    route = "modular"
                else:
                    route = "rootsum"
        if route == "series":
            if N is None:
                N = coefficient_majorant_order(key.k, float(abs(qv.value) + qv.radius), prec.working_dps - 4)
            val = _eval_series(gamma_series_dp(base_key, N), qv, key.k)
        elif route == "modular":
            from .modular import gamma_modular_eval

            if not _is_negative_real(qv):
                raise DomainError("the modular route needs real negative q")
            val = gamma_modular_eval(base_key.k, base_key.n, qv, prec)
        elif route == "rootsum":
            tp = tau_from_q(qv.value, prec)
            c = c_rootsum_eval(base_key, tp, prec)
            val = c * qpow(tp, Fraction(-base_key.n, 2))
            if qv.radius:
                raise DomainError("the root-of-unity route expects an exact nome")
        else:
            raise DomainError(f"unknown route {route!r}")
        if e:
            val = val * qv ** e
        if qv.is_real and not isinstance(val.value, mp.mpf):
            val = ErrValue(mp.re(val.value), val.radius)
        return val


def c_eval(key: CoeffKey, tp: TauPoint, prec: Precision | None = None, **kwargs) -> ErrValue:
    """c_{k,n} = q^{n/2} γ_{k,n}, with q^{1/2} fixed by ``tp``."""
    prec = _prec(prec)
    with prec.context():
        q = qpow(tp, 1)
        qexact = tp.q
        if abs(mp.im(qexact)) < mp.eps * abs(qexact) * 16:
            # keep real nomes real so the series and modular routes apply
            q = ErrValue(mp.re(qexact), q.radius)
        g = gamma_eval(key, q, prec, **kwargs)
        if key.n == 0:
            return g
        return qpow(tp, Fraction(key.n, 2)) * g


def _vt(tp, K, a, prec) -> ErrValue:
    """ϑ_{q^K}(q^a)."""
    return theta_series(tp, K, Fraction(a), 1, prec)


def c_recurrence_eval(k_target: int, n: int, tp: TauPoint, prec: Precision | None = None, reduced: bool = True) -> ErrValue:
    """c_{k,n} built up from c_{1,0} = 1 with the ϑ-recurrence.

    With ``reduced`` the n = 0 step uses the shortened odd/even forms that
    pair n' with k-n'.
    """
    if not 2 <= k_target <= 12:
        raise DomainError("c_recurrence_eval supports 2 <= k <= 12")
    if not 0 <= n < k_target:
        raise DomainError("need 0 <= n < k")
    prec = _prec(prec)
    with prec.context():
        row = [ErrValue(1)]
        for k in range(1, k_target):
            K = k * k + k
            new = []
            for m in range(k + 1):
                if m == 0 and reduced:
                    new.append(_reduced_zero(row, k, tp, prec))
                    continue
                terms = [
                    row[np_] * qpow(tp, Fraction((m - np_) ** 2, 2)) * _vt(tp, K, -k * m + (k + 1) * np_, prec)
                    for np_ in range(k)
                ]
                new.append(_sum(terms))
            row = new
        return row[n]


def _sum(terms) -> ErrValue:
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    return out


def _reduced_zero(row, k: int, tp, prec) -> ErrValue:
    K = k * k + k
    terms = [row[0] * _vt(tp, K, 0, prec)]
    if k % 2:
        kp = (k - 1) // 2
        for n in range(1, kp + 1):
            terms.append(2 * row[n] * qpow(tp, Fraction(n * n, 2)) * _vt(tp, K, (k + 1) * n, prec))
    else:
        kp = k // 2
        terms.append(row[kp] * qpow(tp, Fraction(k * k, 8)) * _vt(tp, K, Fraction((k + 1) * k, 2), prec))
        for n in range(1, kp):
            terms.append(2 * row[n] * qpow(tp, Fraction(n * n, 2)) * _vt(tp, K, (k + 1) * n, prec))
    return _sum(terms)


def closed_form_variants(key: CoeffKey, tp: TauPoint, prec: Precision | None = None) -> dict[str, ErrValue]:
    """Every closed expression available for c_{k,n} with k in {2, 3, 4}.

    Keys name the shape of the formula; all values should agree within radii.
    """
    k, n = key.k, key.n
    if k not in (2, 3, 4) or not 0 <= n < k:
        raise DomainError("closed forms exist for k in {2,3,4} and 0 <= n < k")
    prec = _prec(prec)
    with prec.context():
        qp = lambda a: qpow(tp, a)
        vt = lambda K, a: _vt(tp, K, a, prec)
        out: dict[str, ErrValue] = {}
        if k == 2:
            out["vartheta_q2"] = vt(2, n) * qp(Fraction(n * n, 2))
            return out

        def c3(m):
            return qp(Fraction(m * m, 2)) * vt(2, 0) * vt(6, 2 * m) + qp(Fraction(1 + (m - 1) ** 2, 2)) * vt(2, 1) * vt(6, 2 * m - 3)

        c30_fg = vt(2, 0) * vt(6, 0) + qp(1) * vt(2, 1) * vt(6, 3)
        c31 = qp(Fraction(1, 2)) * (vt(2, 0) * vt(6, 2) + vt(2, 1) * vt(6, 1))
        if k == 3:
            out["two_term"] = c3(n)
            if n == 0:
                out["f_g_product"] = c30_fg
            elif n == 1:
                out["factored"] = c31
            else:
                out["symmetric"] = qp(Fraction(1, 2)) * c31
            return out
        # k == 4
        out["from_c3"] = c30_fg * qp(Fraction(n * n, 2)) * vt(12, 3 * n) + c31 * (
            qp(Fraction((n - 1) ** 2, 2)) * vt(12, -3 * n + 4) + qp(Fraction((n + 1) ** 2, 2)) * vt(12, 3 * n + 4)
        )
        if n == 0:
            out["from_c3_reduced"] = c30_fg * vt(12, 0) + 2 * c31 * qp(Fraction(1, 2)) * vt(12, 4)
            out["expanded"] = vt(2, 0) * vt(6, 0) * vt(12, 0) + qp(1) * (
                vt(2, 1) * vt(6, 3) * vt(12, 0) + 2 * (vt(2, 0) * vt(6, 2) + vt(2, 1) * vt(6, 1)) * vt(12, 4)
            )
        out["squared_pair"] = qp(Fraction(n, 2)) * _a4_theta_side(tp, n, prec)
        if n in (1, 3):
            th1 = theta_series(tp, 1, Fraction(-1, 2), 1, prec)
            out["half_theta_cubed"] = qp(Fraction(n, 2)) * th1 ** 3 / 2
        return out


def _a4_theta_side(tp, i, prec) -> ErrValue:
    # θ_{q^K}(q^s) = Σ q^{K m(m-1)/2 + s m}
    th = lambda K, s: theta_series(tp, K, Fraction(s) - Fraction(K, 2), 1, prec)
    q = qpow(tp, 1)
    if i == 0:
        return th(2, 1) ** 2 * th(4, 2) + q * th(2, 0) ** 2 * th(4, 0)
    if i == 1:
        return 2 * th(2, 0) * th(2, 1) * th(4, 3)
    if i == 2:
        return th(2, 1) ** 2 * th(4, 0) + th(2, 0) ** 2 * th(4, 2)
    return 2 * th(2, 0) * th(2, 1) * th(4, 1)


_PREFERRED = {2: "vartheta_q2", 3: "two_term", 4: "from_c3"}


def c_closed_eval(key: CoeffKey, tp: TauPoint, prec: Precision | None = None) -> ErrValue:
    """The principal closed form of c_{k,n}, k in {2, 3, 4}."""
    if key.k not in _PREFERRED:
        raise DomainError("closed forms exist only for k in {2, 3, 4}")
    return closed_form_variants(key, tp, prec)[_PREFERRED[key.k]]


def c_rootsum_eval(key: CoeffKey, tp: TauPoint, prec: Precision | None = None, x=None) -> ErrValue:
    """c_{k,n} from the k values ϑ^k(x q^{-n/k} μ^j), μ = e^{-2πi/k}.

    With ``x`` omitted this is the x = 1 specialisation.  A nonzero ``x``
    helps when ϑ_{q^k}(1) is tiny, e.g. for k ≡ 2 mod 4 near q = -1.
    """
    k, n = key.k, key.n
    if k < 2:
        raise DomainError("root-of-unity formula needs k >= 2")
    prec = _prec(prec)
    with prec.context():
        xv = ErrValue(1) if x is None else as_errvalue(x)
        terms = []
        for j in range(k):
            mu_j = mp.expjpi(-2 * mp.mpf(j) / k)
            phase = ErrValue(mp.expjpi(2 * mp.mpf(n * j) / k), 4 * mp.eps)
            th = theta_series(tp, 1, Fraction(-n, k), xv * ErrValue(mu_j, 4 * mp.eps), prec)
            terms.append(phase * th ** k)
        denom = theta_series(tp, k, 0, xv ** k, prec)
        if not denom.certified_nonzero():
            raise DomainError("ϑ_{q^k}(x^k) is not certified nonzero at this point")
        return qpow(tp, Fraction(n * n, k)) * xv ** (-n) * _sum(terms) / (k * denom)


def squaring_step(a_k: list, tp: TauPoint, prec: Precision | None = None) -> list:
    """a_{2k,l} (l = 0..2k-1) from a_{k,0..k-1}, all γ-side coefficients.

    Squares θ^k = Σ a_{k,i} x^i θ_{q^k}(q^i x^k) with the two-theta product
    rule; terms whose shift reaches 2k are folded back by quasi-periodicity,
    which contributes Σ_{i+j=l+k} a_i a_j q^{k-j} θ_{q^{2k}}(q^{j-i}) for l <= k-2.
    """
    k = len(a_k)
    prec = _prec(prec)
    with prec.context():
        th = lambda s: theta_series(tp, 2 * k, Fraction(s) - k, 1, prec)  # θ_{q^{2k}}(q^s)
        out = []
        for l in range(2 * k):
            terms = [a_k[i] * a_k[l - i] * th(k + (l - i) - i) for i in range(k) if 0 <= l - i < k]
            if l <= k - 2:
                terms += [a_k[i] * a_k[l + k - i] * qpow(tp, k - (l + k - i)) * th(l + k - 2 * i)
                          for i in range(k) if 0 <= l + k - i < k]
            elif l >= k:
                terms += [a_k[i] * a_k[l - k - i] * qpow(tp, i) * th(l - k - 2 * i)
                          for i in range(k) if 0 <= l - k - i < k]
            out.append(_sum(terms) if terms else ErrValue(0))
        return out
