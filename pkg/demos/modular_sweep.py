# How γ_{k,n} behaves as q runs to -1
#
# Write q = e^{πi - 2πt}.  As t -> 0, q -> -1 along the negative axis, and the
# direct series needs ever more terms.  The modular transform swaps that for a
# rapidly converging Gaussian sum, which also predicts the growth
# Γ_{k,n}(t) ~ t^{(1-k)/2}.

# %%
import mpmath as mp

from thetapow.arith import ErrValue, Precision
from thetapow.asymptotics import classify, gamma_asymptotic_estimate, gamma_profile
from thetapow.coeffs import CoeffKey, gamma_eval

P = Precision(40)


def gamma_at(k, n, t):
    with P.context():
        q = -mp.exp(-2 * mp.pi * t)
        return gamma_eval(CoeffKey(k, n), ErrValue(q, 4 * mp.eps * abs(q)), P)


# %%
# Ratio of the true value to the predicted main term.  For (3,0) the constant
# is -√2, for (4,0) it is -2; both ratios should creep toward 1.

for k, n in [(3, 0), (4, 0), (3, 1), (5, 2)]:
    print(f"({k},{n}) {classify(k, n).verdict.value}")
    for t in ("0.2", "0.1", "0.05", "0.02", "0.01"):
        t = mp.mpf(t)
        g = gamma_at(k, n, t)
        e = gamma_asymptotic_estimate(k, n, t, P) if t <= 0.2 else None
        print(f"   t={mp.nstr(t, 3):5s}  γ={mp.nstr(g.value, 10):>18s}  γ/estimate={mp.nstr(g.value / e.value, 10)}")

# %%
# When k is even and k - 2n ≡ 2 (mod 4), the two leading Gaussian terms cancel
# and γ decays instead.  The ratio to Γ collapses like e^{-π/(16kt)}.

for t in ("0.1", "0.05", "0.03", "0.02"):
    t = mp.mpf(t)
    g = gamma_at(4, 1, t)
    print(f"(4,1) t={mp.nstr(t, 3):5s}  |γ|/Γ = {mp.nstr(abs(g.value) / gamma_profile(4, 1, t), 6)}")
