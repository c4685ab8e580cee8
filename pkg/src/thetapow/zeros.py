"""Certified real zeros of γ_{k,n} on (-1, 0).

A sign counts only when the error radius excludes zero.  Grid points whose
sign cannot be certified are retried at higher precision and then nudged;
whatever still fails is reported as a gap.  Brackets are formed between
consecutive certified points, so a gap never produces a false bracket.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .arith import DomainError, PrecisionCeilingError, Precision, _prec
from .asymptotics import Verdict, classify
from .coeffs import CoeffKey, gamma_eval

log = logging.getLogger(__name__)

__all__ = [
    "ZeroBracket",
    "ScanResult",
    "ContradictionError",
    "ScanBudgetWarning",
    "certified_sign",
    "scan_sign_changes",
    "bisect_certified",
    "find_zeros",
    "DEFAULT_WINDOW",
    "DEFAULT_GRID",
    "DEFAULT_WIDTH",
    "MAX_DIGITS",
]

DEFAULT_WINDOW = (Fraction(-999, 1000), Fraction(-1, 1000))
DEFAULT_GRID = 256
DEFAULT_WIDTH = Fraction(1, 10 ** 8)
MAX_DIGITS = 400


class ContradictionError(RuntimeError):
    """The classifier predicts a sign change that the scan did not find."""


class ScanBudgetWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ZeroBracket:
    k: int
    n: int
    lo: Fraction
    hi: Fraction
    sign_lo: int
    sign_hi: int

    def __post_init__(self):
        if not -1 < self.lo < self.hi < 0:
            raise DomainError("bracket must satisfy -1 < lo < hi < 0")
        if self.sign_lo == self.sign_hi or {self.sign_lo, self.sign_hi} != {-1, 1}:
            raise DomainError("bracket endpoints need opposite certified signs")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2


class ScanResult(list):
    """Brackets in increasing order, plus the subintervals left uncertified."""

    def __init__(self, brackets=(), gaps=()):
        super().__init__(brackets)
        self.gaps = list(gaps)


def _sign_at(key: CoeffKey, q: Fraction, digits: int) -> int:
    v = gamma_eval(key, q, Precision(digits))
    return v.certified_sign()


def certified_sign(key: CoeffKey, q: Fraction, prec: Precision | None = None, max_digits: int = MAX_DIGITS) -> int:
    """Sign of γ at rational q, doubling precision until certified; 0 if it never is."""
    digits = _prec(prec).digits
    while True:
        s = _sign_at(key, q, digits)
        if s:
            return s
        if digits >= max_digits:
            return 0
        digits = min(2 * digits, max_digits)


def _grid(lo: Fraction, hi: Fraction, grid: int) -> list[Fraction]:
    return [lo + (hi - lo) * Fraction(i, grid - 1) for i in range(grid)]


def scan_sign_changes(
    k: int, n: int, lo, hi, grid: int = DEFAULT_GRID, prec: Precision | None = None, refine: int = 4
) -> ScanResult:
    """Coarse brackets from sign changes between consecutive certified grid points."""
    lo, hi = Fraction(lo), Fraction(hi)
    if not -1 < lo < hi < 0 or grid < 2:
        raise DomainError("need -1 < lo < hi < 0 and grid >= 2")
    prec = _prec(prec)
    key = CoeffKey(k, n)
    step = (hi - lo) / (grid - 1)
    pts: list[tuple[Fraction, int]] = []
    gaps = []
    for q in _grid(lo, hi, grid):
        s = certified_sign(key, q, prec, max_digits=min(MAX_DIGITS, 4 * prec.digits))
        tries = 0
        qq = q
        while s == 0 and tries < refine:
            tries += 1
            qq = q + step * Fraction((-1) ** tries * ((tries + 1) // 2), 4 * refine)
            if not lo <= qq <= hi:
                continue
            s = certified_sign(key, qq, prec, max_digits=min(MAX_DIGITS, 4 * prec.digits))
        if s:
            pts.append((qq, s))
        else:
            gaps.append((max(lo, q - step / 2), min(hi, q + step / 2)))
    out = []
    for (a, sa), (b, sb) in zip(pts, pts[1:]):
        if sa != sb:
            out.append(ZeroBracket(k, n, a, b, sa, sb))
    if gaps:
        warnings.warn(
            f"γ_{{{k},{n}}}: {len(gaps)} grid point(s) left uncertified: "
            + ", ".join(f"[{float(a):.6g}, {float(b):.6g}]" for a, b in gaps[:8]),
            ScanBudgetWarning,
            stacklevel=2,
        )
    return ScanResult(out, gaps)


def bisect_certified(bracket: ZeroBracket, target_width, prec: Precision | None = None) -> ZeroBracket:
    """Shrink a bracket to width <= target_width, keeping both end signs certified."""
    target_width = Fraction(target_width)
    if target_width <= 0:
        raise DomainError("target width must be positive")
    prec = _prec(prec)
    key = CoeffKey(bracket.k, bracket.n)
    b = bracket
    while b.width > target_width:
        m = b.midpoint
        s = certified_sign(key, m, prec)
        nudge = 0
        while s == 0:
            nudge += 1
            if nudge > 6:
                raise PrecisionCeilingError(
                    f"cannot certify the sign of γ_{{{b.k},{b.n}}} near {float(m)} at {MAX_DIGITS} digits"
                )
            m = b.midpoint + b.width * Fraction((-1) ** nudge * ((nudge + 1) // 2), 1000)
            s = certified_sign(key, m, prec)
        if s == b.sign_lo:
            b = ZeroBracket(b.k, b.n, m, b.hi, s, b.sign_hi)
        else:
            b = ZeroBracket(b.k, b.n, b.lo, m, b.sign_lo, s)
    return b


def find_zeros(
    k: int,
    n: int,
    prec: Precision | None = None,
    window=DEFAULT_WINDOW,
    grid: int = DEFAULT_GRID,
    width=DEFAULT_WIDTH,
) -> ScanResult:
    """Scan ``window`` for sign changes of γ_{k,n} and refine each bracket.

    Raises ContradictionError when the classifier predicts a sign change
    (γ(0) = C(k,n) > 0 but γ -> -∞ at -1) and none is found.
    """
    if k < 1 or not 0 <= n < k:
        raise DomainError("need k >= 1 and 0 <= n < k")
    prec = _prec(prec)
    coarse = scan_sign_changes(k, n, window[0], window[1], grid, prec)
    fine = ScanResult([bisect_certified(b, width, prec) for b in coarse], coarse.gaps)
    if k >= 3 and not fine and classify(k, n).verdict is Verdict.MINUS_INFINITY:
        raise ContradictionError(
            f"γ_{{{k},{n}}} tends to -∞ at q = -1 but no sign change was certified in "
            f"[{float(window[0])}, {float(window[1])}] with grid {grid}"
        )
    log.debug("γ_{%d,%d}: %d bracket(s), %d gap(s)", k, n, len(fine), len(fine.gaps))
    return fine
