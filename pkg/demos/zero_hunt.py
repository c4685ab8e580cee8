# Hunting the real zero of the hexagonal theta series
#
# γ_{3,0}(q) = Σ r(m) q^m counts pairs (x, y) with x² + xy + y² = m.  At q = 0 it
# equals 1, and toward q = -1 it plunges to -∞.  So it must cross zero
# somewhere on (-1, 0).  Here we find where, with certified signs only.

# %%
from fractions import Fraction
import warnings

from thetapow.arith import Precision
from thetapow.asymptotics import classify
from thetapow.coeffs import CoeffKey, gamma_eval, gamma_series
from thetapow.zeros import bisect_certified, find_zeros, scan_sign_changes

P = Precision(30)

print(gamma_series(CoeffKey(3, 0), 12).as_poly_string())

# %%
# A coarse look at the sign along the axis.  Every value carries a radius, and a
# sign only counts when the radius is smaller than the value.

for q in (Fraction(-1, 20), Fraction(-1, 10), Fraction(-3, 20), Fraction(-1, 5), Fraction(-1, 2)):
    v = gamma_eval(CoeffKey(3, 0), q, P)
    print(f"q = {float(q):6.3f}   γ = {float(v.value): .6e}   sign {v.certified_sign():+d}")

# %%
# One sign change between -0.2 and -0.15.  Scan, then bisect down to 1e-12.

coarse = scan_sign_changes(3, 0, Fraction(-1, 2), Fraction(-1, 100), 40, P)
print("coarse:", [(float(b.lo), float(b.hi)) for b in coarse])
fine = bisect_certified(coarse[0], Fraction(1, 10**12), P)
print(f"fine:   [{float(fine.lo):.13f}, {float(fine.hi):.13f}]")

# %%
# Which other (k, n) are forced to vanish?  Whenever the limit at -1 is -∞,
# the positive binomial value at 0 guarantees a crossing.

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    for k in range(3, 7):
        for n in range(k):
            v = classify(k, n)
            zs = find_zeros(k, n, P, grid=128)
            where = ", ".join(f"{float(b.midpoint):.6f}" for b in zs) or "-"
            print(f"({k},{n})  {v.verdict.value:15s}  zeros near {where}")
