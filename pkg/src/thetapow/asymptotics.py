"""Sign classification of γ_{k,n} near q = -1 and the two asymptotic laws.

Two regimes are covered.  Along q = -x with x -> 1-, ``f_main_term`` gives the
lattice-volume prediction for f_{k,n}.  In the modular variable
q = exp(πi - 2πt) with t -> 0+, ``gamma_asymptotic_estimate`` gives
±2·Γ_{k,n}(t) or ±√2·Γ_{k,n}(t), or an exponentially small bound when the
leading term cancels.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from math import comb

import mpmath as mp

from .arith import DomainError, ErrValue, Precision, _prec
from .modular import ModularPoint, S_kn_eval, s_alpha_modular, theta_qk_one, theta_qk_one_asymptote

__all__ = [
    "Verdict",
    "ClassificationVerdict",
    "classify",
    "ResidueClasses",
    "vanishing_sets",
    "f_main_constant",
    "f_main_term",
    "gamma_profile",
    "gamma_asymptotic_estimate",
    "binomial_residue_sums",
    "binomial_residue_closed",
    "prop314_leading",
    "ModularPoint",
    "S_kn_eval",
    "s_alpha_modular",
    "theta_qk_one",
    "theta_qk_one_asymptote",
]


class Verdict(str, enum.Enum):
    TENDS_TO_ZERO = "tends_to_zero"
    PLUS_INFINITY = "plus_infinity"
    MINUS_INFINITY = "minus_infinity"
    UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class ClassificationVerdict:
    k: int
    n: int
    verdict: Verdict
    corollary_flag: bool
    complementary_flag: bool
    predicted_constant: float | None = None
    case: str = ""

    @property
    def sign(self) -> int:
        if self.verdict is Verdict.PLUS_INFINITY:
            return 1
        if self.verdict is Verdict.MINUS_INFINITY:
            return -1
        return 0


def _case_table(k: int, n: int):
    """(sign, constant, label) or None for the cancelling class."""
    if k % 2 == 0 and (k - 2 * n) % 4 == 2:
        return None
    if k % 4 == 0:
        kp, np_ = k // 4, n // 2
        return (-1) ** (kp - np_), 2.0, "k=4k', n=2n'"
    if k % 4 == 2:
        kp, np_ = (k - 2) // 4, (n - 1) // 2
        return (-1) ** (kp - np_), 2.0, "k=4k'+2, n=2n'+1"
    if k % 4 == 1:
        kp, np_ = (k - 1) // 4, n // 2
        return (-1) ** (kp - np_), mp.sqrt(2), "k=4k'+1, n in {2n', 2n'+1}"
    kp, np_ = (k + 1) // 4, (n + 1) // 2
    return (-1) ** (kp - np_), mp.sqrt(2), "k=4k'-1, n in {2n', 2n'-1}"


def classify(k: int, n: int) -> ClassificationVerdict:
    """Limit behaviour of γ_{k,n}(q) as q -> -1 along the real axis."""
    if k < 3 or not 0 <= n < k:
        raise DomainError("classify needs k >= 3 and 0 <= n < k")
    corollary = (k - 2 * n) % 8 in (3, 4, 5)
    complementary = k % 8 in (2, 4) and n % (k + 1) == 0
    row = _case_table(k, n)
    if row is None:
        return ClassificationVerdict(k, n, Verdict.TENDS_TO_ZERO, corollary, complementary, None, "cancelling")
    sign, const, label = row
    v = Verdict.PLUS_INFINITY if sign > 0 else Verdict.MINUS_INFINITY
    return ClassificationVerdict(k, n, v, corollary, complementary, float(sign * const), label)


@dataclass(frozen=True)
class ResidueClasses:
    """Union of residue classes ``modulus·Z + r`` for r in ``residues``."""

    modulus: int
    residues: tuple[int, ...]

    def __contains__(self, n: int) -> bool:
        return n % self.modulus in self.residues

    def __str__(self) -> str:
        m, rs = self.modulus, self.residues
        if not rs:
            return "{}"
        if rs == (0,):
            return f"{m}Z"
        if len(rs) == 2 and rs[0] + rs[1] == m:
            return f"{m}Z±{rs[0]}"
        return " ∪ ".join(f"{m}Z+{r}" if r else f"{m}Z" for r in rs)


def _coarsest(k: int, res: set[int]) -> ResidueClasses:
    for d in sorted(d for d in range(1, k + 1) if k % d == 0):
        cls = {r % d for r in res}
        if {r for r in range(k) if r % d in cls} == res:
            return ResidueClasses(d, tuple(sorted(cls)))
    return ResidueClasses(k, tuple(sorted(res)))


def vanishing_sets(k: int) -> tuple[frozenset[int], ResidueClasses]:
    """X_k inside [0, k] and the residue description of Y_k = X_k + kZ."""
    if k < 3:
        raise DomainError("k must be at least 3")
    X = frozenset(n for n in range(k + 1) if (k - 2 * n) % 8 in (3, 4, 5))
    return X, _coarsest(k, {n % k for n in X})


def f_main_constant(k: int, n: int) -> mp.mpf:
    eps = 1 if n % 2 == 0 else -1
    c = mp.cospi(mp.mpf(k + eps) / 4)
    return mp.pi ** (mp.mpf(k) / 2) * mp.sqrt(2) / mp.sqrt(k + 1) * c


def f_main_term(k: int, n: int, x) -> mp.mpf:
    """Predicted growth of f_{k,n}(-x) as x -> 1-."""
    x = mp.mpf(x)
    if not 0 < x < 1:
        raise DomainError("x must lie in (0, 1)")
    return f_main_constant(k, n) / (1 - x) ** (mp.mpf(k) / 2)


def gamma_profile(k: int, n: int, t, as_printed: bool = False) -> mp.mpf:
    """Γ_{k,n}(t) = k^{-1/2} 2^{-k/2} e^{πn(k-n)t/k} t^{(1-k)/2}.

    ``as_printed=True`` flips the exponential to e^{πn(n-k)t/k}; that form
    disagrees with the modular representation of γ_{k,n} by a factor
    e^{2πn(k-n)t/k}, which the convergence tests make visible.
    """
    t = mp.mpf(t)
    if t <= 0:
        raise DomainError("t must be positive")
    sgn = -1 if as_printed else 1
    e = mp.exp(sgn * mp.pi * n * (k - n) * t / k)
    return e * t ** (mp.mpf(1 - k) / 2) / (mp.sqrt(k) * mp.mpf(2) ** (mp.mpf(k) / 2))


def gamma_asymptotic_estimate(k: int, n: int, t, prec: Precision | None = None, as_printed: bool = False) -> ErrValue:
    """Predicted γ_{k,n}(e^{πi-2πt}) for small t.

    The cancelling class returns ``ErrValue(0, Γ e^{-κ/t})`` with κ = π/(16k);
    that κ sits below every exponent in the error terms of S_{k,n}, but
    the implied constant is not controlled, so the bound is heuristic.
    """
    prec = _prec(prec)
    if not 0 <= n < k or k < 3:
        raise DomainError("need k >= 3 and 0 <= n < k")
    t = mp.mpf(t)
    if not 0 < t <= mp.mpf("0.2"):
        raise DomainError("t must lie in (0, 0.2]")
    with prec.context():
        G = gamma_profile(k, n, t, as_printed)
        v = classify(k, n)
        if v.verdict is Verdict.TENDS_TO_ZERO:
            kappa = mp.pi / (16 * k)
            return ErrValue(0, G * mp.exp(-kappa / t))
        const = mp.sqrt(2) if k % 2 else mp.mpf(2)
        return ErrValue(v.sign * const * G, 0)


def prop314_leading(k: int, n: int, t) -> mp.mpc:
    """Two-term expansion of S_{k,n} as t -> 0+, split by (k mod 2, n mod 2)."""
    t = mp.mpf(t)
    ik = mp.mpc(0, 1) ** k
    e = mp.exp(-mp.pi / (4 * k * t))
    if k % 2 == 0 and n % 2 == 0:
        return 2 * mp.expjpi(mp.mpf(2 * n - k) / 4) * mp.cospi(mp.mpf(2 * n - k) / 4)
    if k % 2 == 0:
        return 2 * (1 - ik) * e
    if n % 2 == 0:
        return 1 - 2 * ik * e
    return ik + 2 * e


def binomial_residue_sums(k: int) -> tuple[int, int, int, int]:
    """s_j = Σ_{l ≡ j mod 4} C(k, l), summed exactly."""
    if k < 1:
        raise DomainError("k must be positive")
    s = [0, 0, 0, 0]
    for l in range(k + 1):
        s[l % 4] += comb(k, l)
    return tuple(s)


def binomial_residue_closed(k: int) -> tuple[mp.mpf, ...]:
    """Root-of-unity filter: s_j = (2^k + 2^{k/2+1} cos((k-2j)π/4) + 0^k(-1)^j)/4."""
    out = []
    for j in range(4):
        v = mp.mpf(2) ** k + mp.mpf(2) ** (mp.mpf(k) / 2 + 1) * mp.cospi(mp.mpf(k - 2 * j) / 4)
        if k == 0:
            v += (-1) ** j
        out.append(v / 4)
    return tuple(out)
