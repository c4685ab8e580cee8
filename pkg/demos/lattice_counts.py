# Integer points inside the ellipses of x² + xy + y²
#
# The generating function of γ_{3,0} counts points of the hexagonal lattice.  The
# number of them with x² + xy + y² <= M grows like the ellipse area 2πM/√3,
# with an error no worse than about √M.

# %%
import mpmath as mp
import numpy as np

from thetapow.arith import Precision
from thetapow.lattice import ThetaPowerForm, ellipsoid_volume, lattice_count, phi_eval, poisson_residual, random_form

hexagonal = ThetaPowerForm(2).quad_lin()
Ms = [1, 10, 25, 50, 100, 200, 400, 800]
counts = np.array([lattice_count(hexagonal, M) for M in Ms])
areas = np.array([float(ellipsoid_volume(hexagonal, M)) for M in Ms])

for M, c, a in zip(Ms, counts, areas):
    print(f"M={M:4d}  count={c:6d}  area={a:10.2f}  (count-area)/√M={(c - a) / np.sqrt(M): .3f}")

# %%
# Three dimensions: the form Σ_{i<=j} m_i m_j has discriminant 4/8.

cubic = ThetaPowerForm(3).quad_lin()
print("D_Q =", cubic.discriminant)
for M in (25, 100, 400):
    c, v = lattice_count(cubic, M), ellipsoid_volume(cubic, M)
    print(f"M={M:4d}  count={c:7d}  volume={float(v):11.2f}  err/M={abs(c - float(v)) / M:.3f}")

# %%
# Summing x^{F(m)} shell by shell.  Near x = 1 the sum behaves like
# π^{k/2} / (√D (1-x)^{k/2}).

P = Precision(30)
for x in ("0.9", "0.99", "0.995"):
    xv = mp.mpf(x)
    s = phi_eval(hexagonal, xv, P).value
    print(f"x={x:5s}  Φ={mp.nstr(s, 12):>16s}  normalized={mp.nstr(s * (1 - xv) * mp.sqrt(0.75) / mp.pi, 6)}")

# %%
# Poisson summation turns the Gaussian sum of a form into one over its inverse.
# The residual vanishes within its radius.

rng = np.random.default_rng(7)
for _ in range(4):
    f = random_form(3, rng)
    r = poisson_residual(f, P)
    print(f"k=3 form, residual {mp.nstr(abs(r.value), 3)} <= radius {mp.nstr(r.radius, 3)}")
