"""Integer points under positive definite quadratic-plus-linear forms.

Everything here works with F(y) + L(y) = yᵀAy + bᵀy.  Completing the square
puts the ellipsoid {F + L <= M} inside the exact box

    |y_i - c_i| <= sqrt(R · (A⁻¹)_{ii}),   c = -A⁻¹b/2,  R = M + cᵀAc,

which is tight on every axis, so enumeration never needs an eigenvalue
estimate.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import mpmath as mp
import numpy as np

from .arith import DomainError, ErrValue, NonconvergenceError, Precision, _prec, _up, as_errvalue
from .coeffs import CoeffKey, ScaleError, gamma_eval

__all__ = [
    "QuadLinForm",
    "ThetaPowerForm",
    "BOX_BUDGET",
    "lattice_count",
    "ellipsoid_volume",
    "f_kn_eval",
    "phi_eval",
    "s_alpha_eval",
    "s_alpha_main_term",
    "poisson_residual",
    "random_form",
]

BOX_BUDGET = 20_000_000


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, str)):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v)
    raise TypeError(f"cannot read {v!r} as a rational")


def _mpf(v):
    if isinstance(v, (Fraction, int)):
        v = Fraction(v)
        return mp.mpf(v.numerator) / v.denominator
    return mp.mpf(v)


def _ldl(A):
    """Exact LDLᵀ of a symmetric matrix; returns the pivots or None if singular."""
    k = len(A)
    M = [list(r) for r in A]
    piv = []
    for j in range(k):
        d = M[j][j]
        if d == 0:
            return None
        piv.append(d)
        for i in range(j + 1, k):
            f = M[i][j] / d
            for l in range(j, k):
                M[i][l] -= f * M[j][l]
    return piv


def _inverse(A):
    k = len(A)
    M = [list(A[i]) + [Fraction(int(i == j)) for j in range(k)] for i in range(k)]
    for c in range(k):
        p = next(r for r in range(c, k) if M[r][c] != 0)
        M[c], M[p] = M[p], M[c]
        pv = M[c][c]
        M[c] = [v / pv for v in M[c]]
        for r in range(k):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return tuple(tuple(r[k:]) for r in M)


@dataclass(frozen=True)
class QuadLinForm:
    """F(y) = yᵀAy and L(y) = bᵀy with rational A (symmetric) and b.

    A may instead hold mpmath reals; the exact counting routines then refuse
    it, but the Gaussian sums still work.
    """

    A: tuple
    b: tuple = ()
    exact: bool = field(init=False, default=True)

    def __post_init__(self):
        rows = [list(r) for r in self.A]
        k = len(rows)
        if k == 0 or any(len(r) != k for r in rows):
            raise DomainError("A must be a non-empty square matrix")
        b = list(self.b) if self.b else [0] * k
        if len(b) != k:
            raise DomainError("b has the wrong length")
        try:
            A = tuple(tuple(_frac(v) for v in r) for r in rows)
            bb = tuple(_frac(v) for v in b)
            exact = True
        except TypeError:
            A = tuple(tuple(mp.mpf(v) for v in r) for r in rows)
            bb = tuple(mp.mpf(v) for v in b)
            exact = False
        if any(A[i][j] != A[j][i] for i in range(k) for j in range(k)):
            raise DomainError("A must be symmetric")
        piv = _ldl(A)
        if piv is None or any(p <= 0 for p in piv):
            raise DomainError("A is not positive definite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", bb)
        object.__setattr__(self, "exact", exact)

    @property
    def k(self) -> int:
        return len(self.A)

    @property
    def discriminant(self):
        return reduce(lambda x, y: x * y, _ldl(self.A))

    @property
    def inverse(self):
        if self.exact:
            return _inverse(self.A)
        return tuple(tuple(r) for r in mp.inverse(mp.matrix(self.A)).tolist())

    @property
    def center(self):
        Ai = self.inverse
        return tuple(-sum(Ai[i][j] * self.b[j] for j in range(self.k)) / 2 for i in range(self.k))

    @property
    def shift(self):
        """-min(F + L) over R^k, i.e. cᵀAc = bᵀA⁻¹b/4."""
        Ai = self.inverse
        return sum(self.b[i] * Ai[i][j] * self.b[j] for i in range(self.k) for j in range(self.k)) / 4

    def value(self, y) -> Fraction:
        k = self.k
        return sum(self.A[i][j] * y[i] * y[j] for i in range(k) for j in range(k)) + sum(
            self.b[i] * y[i] for i in range(k)
        )


@dataclass(frozen=True)
class ThetaPowerForm:
    """Q(m) = Σ_{i<=j} m_i m_j and S(m) = Σ m_i; the exponent is Q(m) - nS(m)."""

    k: int
    n: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise DomainError("k must be positive")

    @property
    def D_Q(self) -> Fraction:
        return Fraction(self.k + 1, 2 ** self.k)

    def quad_lin(self) -> QuadLinForm:
        k = self.k
        half = Fraction(1, 2)
        A = [[Fraction(1) if i == j else half for j in range(k)] for i in range(k)]
        return QuadLinForm(A, [-self.n] * k)


def _box(form: QuadLinForm, M):
    R = M + form.shift
    if R < 0:
        return None
    Ai = form.inverse
    c = form.center
    lo, hi = [], []
    for i in range(form.k):
        w = math.sqrt(float(R * Ai[i][i])) * (1 + 1e-12) + 1e-9
        lo.append(math.floor(float(c[i]) - w))
        hi.append(math.ceil(float(c[i]) + w))
    return lo, hi


def _scaled_integer_form(form: QuadLinForm):
    """(D, A_int, b_int) with D(F + L) = Σ_{i<=j} A_int[i,j] y_i y_j + b_intᵀy in integers."""
    k = form.k
    coef = {(i, j): form.A[i][i] if i == j else 2 * form.A[i][j] for i in range(k) for j in range(i, k)}
    D = 1
    for v in itertools.chain(coef.values(), form.b):
        D = D * v.denominator // math.gcd(D, v.denominator)
    A = np.zeros((k, k), dtype=object)
    for (i, j), v in coef.items():
        A[i, j] = int(v * D)
    b = np.array([int(v * D) for v in form.b], dtype=object)
    return D, A, b


def _box_values(form: QuadLinForm, M):
    """Scaled integer values D(F+L) of every point in the bounding box of {F+L <= M}."""
    if not form.exact:
        raise DomainError("exact enumeration needs a rational form")
    box = _box(form, M)
    D, A, b = _scaled_integer_form(form)
    if box is None:
        return D, np.zeros(0, dtype=np.int64)
    lo, hi = box
    sizes = [h - l + 1 for l, h in zip(lo, hi)]
    if math.prod(sizes) > BOX_BUDGET:
        raise ScaleError(f"bounding box has {math.prod(sizes)} points, budget is {BOX_BUDGET}")
    bound = max(int(abs(v)) for v in itertools.chain(A.flat, b.flat)) + 1
    ext = max(max(abs(l), abs(h)) for l, h in zip(lo, hi)) + 1
    dtype = np.int64 if bound * form.k ** 2 * ext ** 2 < 2 ** 62 else object
    grids = np.meshgrid(*[np.arange(l, h + 1, dtype=np.int64) for l, h in zip(lo, hi)], indexing="ij")
    Y = [g.ravel().astype(dtype) for g in grids]
    vals = np.zeros(Y[0].shape, dtype=dtype)
    for i in range(form.k):
        vals = vals + int(b[i]) * Y[i]
        for j in range(i, form.k):
            if A[i, j]:
                vals = vals + int(A[i, j]) * Y[i] * Y[j]
    return D, vals


def lattice_count(form: QuadLinForm, M) -> int:
    """Number of integer y with F(y) + L(y) <= M, by exact enumeration."""
    M = _frac(M) if not isinstance(M, Fraction) else M
    D, vals = _box_values(form, M)
    if vals.size == 0:
        return 0
    cut = math.floor(M * D)
    return int(np.count_nonzero(vals <= cut))


def ellipsoid_volume(form: QuadLinForm, M) -> mp.mpf:
    """Volume of {F + L <= M}: V_k (M + y₀²)^{k/2} / sqrt(D_F)."""
    R = _mpf(M) + _mpf(form.shift)
    if R < 0:
        raise DomainError("the ellipsoid is empty")
    k = form.k
    D = form.discriminant
    D = mp.mpf(D.numerator) / D.denominator if isinstance(D, Fraction) else mp.mpf(D)
    Vk = mp.pi ** (mp.mpf(k) / 2) / mp.gamma(mp.mpf(k) / 2 + 1)
    return Vk / mp.sqrt(D) * R ** (mp.mpf(k) / 2)


def f_kn_eval(k: int, n: int, x, prec: Precision | None = None, **kwargs) -> ErrValue:
    """f_{k,n}(x) = Σ_{m ∈ Z^k} x^{Q(m) - nS(m)}, read off from γ_{k+1,n}."""
    prec = _prec(prec)
    if k < 1:
        raise DomainError("k must be positive")
    with prec.context():
        xv = as_errvalue(x)
        g = gamma_eval(CoeffKey(k + 1, n), xv, prec, **kwargs)
        e = n * (n - 1) // 2
        if e == 0:
            return g
        if not xv.certified_nonzero():
            raise DomainError("x must be nonzero when n(n-1) > 0")
        return g / xv ** e


def _box_count_bound(form: QuadLinForm, M) -> mp.mpf:
    """Upper bound for #{y : F + L <= M} from the box side lengths."""
    R = mp.mpf(M) + _mpf(form.shift)
    if R < 0:
        return mp.mpf(0)
    Ai = form.inverse
    out = mp.mpf(1)
    for i in range(form.k):
        out *= 2 * mp.sqrt(R * _mpf(Ai[i][i])) + 1
    return out


def _shell_tail(form: QuadLinForm, M, decay_at) -> mp.mpf:
    """Σ_{j>=0} N(M+j+1)·decay(M+j), N the box count bound, decay log-linear.

    log N is concave in M, so once consecutive terms shrink they keep
    shrinking at least as fast and the rest is a geometric series.
    """
    total = mp.mpf(0)
    prev = None
    for j in range(100_000):
        term = _box_count_bound(form, M + j + 1) * decay_at(M + j)
        total += term
        if prev is not None and prev > 0 and term < prev:
            r = term / prev
            return total + term * r / (1 - r)
        prev = term
    raise NonconvergenceError("shell tail does not decay")


def phi_eval(form: QuadLinForm, x, prec: Precision | None = None) -> ErrValue:
    """Φ_{F,L}(x) = Σ_m x^{F(m)+L(m)} by grouping points into value shells.

    Non-integral values of F + L need a branch of x^{1/D}; those forms are
    accepted only for real x in (0, 1).
    """
    prec = _prec(prec)
    with prec.context():
        xv = as_errvalue(x)
        ax = xv.abs_upper()
        if ax >= 1:
            raise NonconvergenceError("need |x| < 1")
        D, _, _ = _scaled_integer_form(form)
        if D > 1 and not (xv.is_real and mp.re(xv.value) > 0):
            raise DomainError("fractional exponents need real positive x")
        if xv.abs_lower() == 0:
            # x = 0: only the minimal shell survives, and only if its value is 0
            vals = _box_values(form, 0)[1]
            return ErrValue(int(np.count_nonzero(vals == 0)) if vals.size else 0)
        logx = -mp.log(ax)
        base = -_mpf(form.shift)
        need = -mp.log(prec.target) + 10
        M = mp.ceil(base + need / logx)
        for _ in range(8):
            tail = _shell_tail(form, M, lambda s: ax ** s)
            if tail < prec.target / 4:
                break
            M = M * 2
        else:
            raise NonconvergenceError("x too close to the unit circle for the budget")
        Dd, vals = _box_values(form, Fraction(int(M)))
        vals = vals[vals <= int(M) * Dd]
        lo = int(vals.min())
        counts = np.bincount(np.asarray(vals - lo, dtype=np.int64))
        support = np.nonzero(counts)[0]
        x0 = xv.value
        step = x0 if Dd == 1 else mp.power(x0, mp.mpf(1) / Dd)
        total = mp.mpc(0)
        absum = mp.mpf(0)
        p = mp.power(step, lo)
        at = 0
        for s in support:
            s = int(s)
            if s - at > 8:
                p = mp.power(step, s + lo)
            else:
                p *= step ** (s - at)
            at = s
            total += int(counts[s]) * p
            absum += int(counts[s]) * abs(p) * (1 + abs(s + lo) / Dd)
        rad = tail + 8 * mp.eps * absum * len(support)
        if xv.radius:
            # derivative magnitude Σ c_v v |x|^{v-1}, bounded by absum/|x|
            rad += absum / mp.mpf(ax) * xv.radius * (1 + 1 / Dd) * 2
        if xv.is_real:
            total = mp.re(total)
        return ErrValue(total, _up(rad))


def s_alpha_eval(alpha, x, prec: Precision | None = None) -> ErrValue:
    """S_α(x) = Σ_{n>=0} n^α x^n with an integral-test tail bound."""
    prec = _prec(prec)
    with prec.context():
        a = mp.mpf(alpha)
        x = mp.mpf(x)
        if not 0 < x < 1 or a <= 0:
            raise DomainError("need alpha > 0 and 0 < x < 1")
        lam = -mp.log(x)
        peak = a / lam
        total = mp.mpf(0)
        n = 1
        target = prec.target * (1 + abs(s_alpha_main_term(a, x)))
        while True:
            term = mp.power(n, a) * x ** n
            total += term
            if n > peak + 1 and term < target / 16:
                # beyond the peak the summand decreases, so the tail is at most the integral from n
                tail = mp.gammainc(a + 1, n * lam) / lam ** (a + 1)
                if tail < target:
                    break
            n += 1
        return ErrValue(total, _up(tail + 4 * n * mp.eps * total))


def s_alpha_main_term(alpha, x) -> mp.mpf:
    """Γ(α+1)/(1-x)^{α+1}."""
    a = mp.mpf(alpha)
    return mp.gamma(a + 1) / (1 - mp.mpf(x)) ** (a + 1)


def _gauss_lattice(Amat, bvec, phase_vec, prec: Precision):
    """Σ_m exp(-(mᵀAm + bᵀm)) · exp(πi phaseᵀm) over Z^k, with a tail bound.

    A, b, phase are mpmath values; the box comes from the mp inverse.
    """
    k = len(Amat)
    A = mp.matrix(Amat)
    b = mp.matrix(bvec)
    Ai = mp.inverse(A)
    c = -(Ai * b) / 2
    shift = (b.T * Ai * b)[0] / 4
    need = -mp.log(prec.target) + 10
    M = need - shift
    R = M + shift
    lo = [int(mp.floor(c[i] - mp.sqrt(R * Ai[i, i]))) - 1 for i in range(k)]
    hi = [int(mp.ceil(c[i] + mp.sqrt(R * Ai[i, i]))) + 1 for i in range(k)]
    if math.prod(h - l + 1 for l, h in zip(lo, hi)) > BOX_BUDGET // 10:
        raise ScaleError("Gaussian lattice box over budget")
    total = mp.mpc(0)
    absum = mp.mpf(0)
    for y in itertools.product(*[range(l, h + 1) for l, h in zip(lo, hi)]):
        e = mp.mpf(0)
        for i in range(k):
            if y[i]:
                e += b[i] * y[i]
                e += A[i, i] * y[i] * y[i]
                for j in range(i + 1, k):
                    if y[j]:
                        e += 2 * A[i, j] * y[i] * y[j]
        if e > M + 1:
            continue
        mag = mp.exp(-e)
        ph = mp.fsum(phase_vec[i] * y[i] for i in range(k)) if phase_vec is not None else 0
        total += mag * mp.expjpi(ph) if ph else mag
        absum += mag * (1 + abs(e) + abs(ph))
    # points outside the summed ellipsoid: shells beyond M with counts from the box bound
    diag = [Ai[i, i] for i in range(k)]

    def count_bound(s):
        RR = s + shift
        if RR < 0:
            return mp.mpf(0)
        out = mp.mpf(1)
        for d in diag:
            out *= 2 * mp.sqrt(RR * d) + 1
        return out

    tail = mp.mpf(0)
    j = 0
    while True:
        term = count_bound(M + j + 2) * mp.exp(-(M + j + 1))
        tail += term
        if term < tail * mp.eps or term < prec.target * 1e-10:
            tail = tail * 2
            break
        j += 1
    return ErrValue(total, _up(tail + 8 * mp.eps * absum))


def poisson_residual(form: QuadLinForm, prec: Precision | None = None) -> ErrValue:
    """LHS - RHS of the Poisson identity for Σ_m e^{-(F(m) + L(m))}.

    RHS = π^{k/2} e^{F̃(b/2)} / sqrt(det A) · Σ_m e^{-π² F̃(m)} e^{iπ bᵀA⁻¹m},
    where F̃ is the quadratic form of A⁻¹.
    """
    prec = _prec(prec)
    with prec.context():
        k = form.k
        A = [[_mpf(v) for v in r] for r in form.A]
        b = [_mpf(v) for v in form.b]
        Am = mp.matrix(A)
        Ai = mp.inverse(Am)
        det = mp.det(Am)
        lhs = _gauss_lattice(A, b, None, prec)
        dualA = [[mp.pi ** 2 * Ai[i, j] for j in range(k)] for i in range(k)]
        phase = [mp.fsum(b[i] * Ai[i, j] for i in range(k)) for j in range(k)]
        dual = _gauss_lattice(dualA, [mp.mpf(0)] * k, phase, prec)
        Ftil = mp.fsum(b[i] * Ai[i, j] * b[j] for i in range(k) for j in range(k)) / 4
        pref = mp.pi ** (mp.mpf(k) / 2) * mp.exp(Ftil) / mp.sqrt(det)
        rhs = ErrValue(pref, 16 * mp.eps * pref * (1 + k + abs(Ftil))) * dual
        return lhs - rhs


def random_form(k: int, rng: np.random.Generator, with_linear: bool = True) -> QuadLinForm:
    """A seeded positive definite (A, b): A = (GᵀG + I)/2 with small integer G."""
    G = rng.integers(-2, 3, size=(k, k))
    A = [[Fraction(int((G[:, i] * G[:, j]).sum()) + int(i == j), 2) for j in range(k)] for i in range(k)]
    b = [Fraction(int(v), 4) for v in rng.integers(-4, 5, size=k)] if with_linear else [0] * k
    return QuadLinForm(A, b)
