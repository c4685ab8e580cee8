"""Named invariant suites shared by ``thetapow verify`` and the acceptance tests."""
from __future__ import annotations

from dataclasses import dataclass, field

import mpmath as mp
import numpy as np

from .arith import ErrValue, Precision, TauPoint, _prec
from .asymptotics import (
    f_main_constant,
    gamma_asymptotic_estimate,
    gamma_profile,
    theta_qk_one_asymptote,
)
from .coeffs import CoeffKey, c_eval, c_recurrence_eval, c_rootsum_eval, closed_form_variants, gamma_eval
from .lattice import ThetaPowerForm, ellipsoid_volume, f_kn_eval, lattice_count, poisson_residual, random_form
from .modular import ModularPoint
from .theta import IdentityId, identity_residual, sample_points, vartheta_rebased

__all__ = ["Check", "SUITES", "run_suite", "within"]

DEFAULT_SEED = 0x5EED


@dataclass
class Check:
    name: str
    passed: bool
    residual: mp.mpf | None = None
    radius: mp.mpf | None = None
    detail: str = ""
    extra: dict = field(default_factory=dict)


def within(v: ErrValue, name: str) -> Check:
    r = abs(v.value)
    return Check(name, bool(r <= v.radius), r, v.radius)


def identities(prec: Precision, seed: int = DEFAULT_SEED, points: int = 20) -> list[Check]:
    out = []
    samples = sample_points(points, seed)
    for ident in IdentityId:
        worst = None
        ok = True
        for tp, x in samples:
            r = identity_residual(ident, tp, x, prec)
            ok &= abs(r.value) <= r.radius
            if worst is None or abs(r.value) - r.radius > abs(worst.value) - worst.radius:
                worst = r
        out.append(Check(f"identity {ident.value}", ok, abs(worst.value), worst.radius, f"{points} points"))
    return out


def routes(prec: Precision, seed: int = DEFAULT_SEED, points: int = 20, kmax: int = 4) -> list[Check]:
    """Series, recurrence, closed forms and the root-of-unity sum for c_{k,n}."""
    out = []
    samples = sample_points(points, seed)
    for k in range(2, kmax + 1):
        for n in range(k):
            key = CoeffKey(k, n)
            worst_excess, worst = None, None
            ok = True
            for tp, _ in samples:
                base = c_eval(key, tp, prec)
                others = {"recurrence": c_recurrence_eval(k, n, tp, prec), "rootsum": c_rootsum_eval(key, tp, prec)}
                for name, v in closed_form_variants(key, tp, prec).items():
                    others[f"closed:{name}"] = v
                for v in others.values():
                    d = abs(v.value - base.value)
                    rad = v.radius + base.radius
                    ok &= d <= rad
                    if worst_excess is None or d - rad > worst_excess:
                        worst_excess, worst = d - rad, (d, rad)
            out.append(
                Check(f"routes c_{{{k},{n}}}", ok, worst[0], worst[1], f"{len(others) + 1} routes, {points} points")
            )
    return out


def _gamma_at_t(k: int, n: int, t, prec: Precision) -> ErrValue:
    with prec.context():
        q = -mp.exp(-2 * mp.pi * mp.mpf(t))
        return gamma_eval(CoeffKey(k, n), ErrValue(q, 4 * mp.eps * abs(q)), prec)


def _monotone_down(devs) -> bool:
    return all(b < a for a, b in zip(devs, devs[1:]))


def main_term_trend(k: int, n: int, prec: Precision, xs=("0.9", "0.99", "0.999"), band: float = 0.15) -> Check:
    """f_{k,n}(-x)(1-x)^{k/2} against its limit constant.

    When the constant vanishes the deviation is measured against the
    constant's amplitude π^{k/2}√2/√(k+1), so it reads as a relative error
    of the same scale.
    """
    C = f_main_constant(k, n)
    amp = mp.pi ** (mp.mpf(k) / 2) * mp.sqrt(2) / mp.sqrt(k + 1)
    devs, vals = [], []
    with prec.context():
        for x in xs:
            x = mp.mpf(x)
            f = f_kn_eval(k, n, ErrValue(-x, 0), prec)
            v = f.value * (1 - x) ** (mp.mpf(k) / 2)
            vals.append(v)
            devs.append(abs(v / C - 1) if abs(C) > amp * mp.mpf(10) ** -20 else abs(v) / amp)
    ok = _monotone_down(devs) and devs[-1] <= band
    return Check(
        f"main term f_{{{k},{n}}}",
        ok,
        devs[-1],
        mp.mpf(band),
        "deviations " + ", ".join(mp.nstr(d, 4) for d in devs),
        {"x": list(xs), "scaled": vals, "constant": C},
    )


def modular_trend(k: int, n: int, prec: Precision, ts=("0.10", "0.07", "0.05"), band: float = 0.1) -> Check:
    est_sign = None
    devs, ratios = [], []
    for t in ts:
        g = _gamma_at_t(k, n, t, prec)
        e = gamma_asymptotic_estimate(k, n, t, prec)
        if e.value == 0:
            ratios.append(abs(g.value) / gamma_profile(k, n, t))
            devs.append(ratios[-1])
        else:
            ratios.append(g.value / e.value)
            devs.append(abs(ratios[-1] - 1))
            est_sign = 1 if e.value > 0 else -1
    if est_sign is None:
        ok = _monotone_down(devs) and devs[-1] < 0.05
        what = f"zero class |γ_{{{k},{n}}}|/Γ"
        tol = mp.mpf("0.05")
    else:
        g_sign = 1 if _gamma_at_t(k, n, ts[-1], prec).value > 0 else -1
        ok = _monotone_down(devs) and devs[-1] <= band and g_sign == est_sign
        what = f"modular estimate γ_{{{k},{n}}}"
        tol = mp.mpf(band)
    return Check(what, ok, devs[-1], tol, "ratios " + ", ".join(mp.nstr(r, 6) for r in ratios), {"t": list(ts)})


def theta_lemma(prec: Precision, t="0.05") -> list[Check]:
    """ϑ_{q^k}(1) against its leading asymptote.

    The tolerance is 1%, widened to the size of the first omitted term
    2e^{-π/(4kt)} where that term is larger (odd k).
    """
    out = []
    with prec.context():
        mpt = ModularPoint(mp.mpf(t))
        tp = TauPoint(mpt.tau)
        for k in (1, 2, 3, 4):
            v = vartheta_rebased(tp, k, 0, 1, prec).value
            a = theta_qk_one_asymptote(k, mpt.t)
            dev = abs(v / a - 1)
            tol = max(mp.mpf("0.01"), mp.mpf("1.05") * 2 * mp.exp(-mp.pi / (4 * k * mpt.t)) if k % 2 else 0)
            detail = ""
            if k % 4 == 2:
                printed = theta_qk_one_asymptote(k, mpt.t, as_printed=True)
                detail = f"printed e^(-1/(4kt)) form is off by {mp.nstr(abs(v / printed - 1), 4)}"
            out.append(Check(f"theta lemma k={k}", bool(dev <= tol), dev, tol, detail))
    return out


def asymptotics(prec: Precision, seed: int = DEFAULT_SEED) -> list[Check]:
    out = [main_term_trend(k, n, prec) for k, n in [(2, 0), (3, 0), (3, 1), (4, 1)]]
    out += [modular_trend(k, n, prec) for k, n in [(3, 0), (3, 1), (4, 0), (5, 1), (4, 1), (6, 0)]]
    out += theta_lemma(prec)
    return out


def count_volume_law(k: int, Ms=(25, 50, 100, 200, 400)) -> Check:
    form = ThetaPowerForm(k).quad_lin()
    errs = [abs(lattice_count(form, M) - ellipsoid_volume(form, M)) / mp.mpf(M) ** (mp.mpf(k - 1) / 2) for M in Ms]
    med = sorted(errs)[len(errs) // 2]
    return Check(
        f"count/volume law k={k}",
        bool(max(errs) <= 4 * med),
        max(errs),
        4 * med,
        "normalized errors " + ", ".join(mp.nstr(e, 4) for e in errs),
    )


def lattice(prec: Precision, seed: int = DEFAULT_SEED) -> list[Check]:
    out = [count_volume_law(2), count_volume_law(3)]
    form = ThetaPowerForm(2).quad_lin()
    ratio = mp.mpf(lattice_count(form, 400)) / 400
    target = 2 * mp.pi / mp.sqrt(3)
    out.append(Check("ellipse constant k=2 at M=400", bool(abs(ratio / target - 1) <= 0.05), abs(ratio / target - 1), mp.mpf("0.05")))
    counts = [lattice_count(form, M) for M in range(0, 60)]
    out.append(Check("count nondecreasing", all(a <= b for a, b in zip(counts, counts[1:]))))
    return out


def poisson(prec: Precision, seed: int = DEFAULT_SEED, forms: int = 10) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    for i in range(forms):
        f = random_form(1 + i % 3, rng)
        c = within(poisson_residual(f, prec), f"poisson form {i} (k={f.k})")
        out.append(c)
    return out


SUITES = {
    "identities": identities,
    "routes": routes,
    "asymptotics": asymptotics,
    "lattice": lattice,
    "poisson": poisson,
}


def run_suite(name: str, prec: Precision | int | None = None, seed: int = DEFAULT_SEED) -> list[Check]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    prec = _prec(prec)
    return SUITES[name](prec, seed)
