"""``thetapow`` command line.

Numbers in json and csv payloads are decimal strings.  Every evaluated value
comes with a ``radius`` that already includes the rounding of the printed
value, so ``[value - radius, value + radius]`` is a valid enclosure as
printed.

CSV columns:
  coeff (series)     m,coeff
  coeff (value)      k,n,q,value,radius
  verify             check,passed,residual,radius,detail
  zeros              k,n,lo,hi,sign_lo,sign_hi,lo_exact,hi_exact
  classify           k,n,verdict,corollary_flag,complementary_flag,predicted_constant,case
  asymptote          t,gamma,gamma_radius,profile,ratio
  lattice            M,count,volume
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .arith import DomainError, ErrValue, NonconvergenceError, Precision, PrecisionCeilingError
from .asymptotics import classify, gamma_profile, vanishing_sets
from .cache import SeriesCache
from .coeffs import CoeffKey, ScaleError, gamma_eval
from .lattice import ThetaPowerForm, ellipsoid_volume, lattice_count
from .suites import SUITES, run_suite
from .zeros import DEFAULT_GRID, ContradictionError, find_zeros

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_ARGS, EXIT_CEILING, EXIT_CONTRADICTION = 0, 1, 2, 3, 4

log = logging.getLogger("thetapow")


@dataclass(frozen=True)
class RunConfig:
    precision: int = 50
    order: int | None = None
    format: str = "text"
    cache_dir: str = "./cache"
    seed: int = 0x5EED

    @property
    def prec(self) -> Precision:
        return Precision(self.precision)

    def as_dict(self) -> dict:
        return {
            "precision": self.precision,
            "order": self.order,
            "format": self.format,
            "cache_dir": self.cache_dir,
            "seed": hex(self.seed),
        }


class ArgError(ValueError):
    pass


def _dec(x, digits: int) -> str:
    if isinstance(x, mp.mpc):
        if x.imag == 0:
            x = x.real
        else:
            return f"{_dec(x.real, digits)}{'+' if x.imag >= 0 else '-'}{_dec(abs(x.imag), digits)}j"
    return mp.nstr(mp.mpf(x), digits, min_fixed=-6, max_fixed=12) if x else "0"


def _rad(r, value, digits: int) -> str:
    # add half a unit in the last printed digit, then round the radius up
    r = mp.mpf(r) + abs(value) * mp.mpf(10) ** (1 - digits) / 2
    if r == 0:
        return "0"
    e = int(mp.floor(mp.log10(r))) - 2
    return mp.nstr(mp.ceil(r / mp.mpf(10) ** e) * mp.mpf(10) ** e, 3)


def _value_fields(v: ErrValue, digits: int) -> dict:
    return {"value": _dec(v.value, digits), "radius": _rad(v.radius, abs(v.value), digits)}


def _frac_dec(f: Fraction, digits: int = 20, rounding: str = "floor") -> str:
    """Decimal string that rounds ``f`` outward in the given direction."""
    scale = 10 ** digits
    num = f.numerator * scale
    q = num // f.denominator if rounding == "floor" else -((-num) // f.denominator)
    sign = "-" if q < 0 else ""
    q = abs(q)
    whole, frac = divmod(q, scale)
    out = f"{sign}{whole}.{str(frac).rjust(digits, '0').rstrip('0') or '0'}"
    return out


def _parse_window(s: str) -> tuple[Fraction, Fraction]:
    try:
        lo, hi = s.split(":")
        return Fraction(lo), Fraction(hi)
    except ValueError as exc:
        raise ArgError(f"--window expects lo:hi, got {s!r}") from exc


def _parse_krange(s: str) -> range:
    try:
        if ":" in s:
            a, b = s.split(":")
            return range(int(a), int(b) + 1)
        return range(int(s), int(s) + 1)
    except ValueError as exc:
        raise ArgError(f"--k expects an integer or a range a:b, got {s!r}") from exc


def _parse_list(s: str, conv=str) -> list:
    try:
        return [conv(v) for v in s.split(",") if v.strip()]
    except ValueError as exc:
        raise ArgError(f"cannot parse list {s!r}") from exc


class Output:
    """Collects rows and metadata; renders text, csv or json deterministically."""

    def __init__(self, command: str, cfg: RunConfig, columns: list[str]):
        self.command = command
        self.cfg = cfg
        self.columns = columns
        self.rows: list[dict] = []
        self.meta: dict = {}
        self.notes: list[str] = []

    def add(self, **row):
        self.rows.append(row)

    def render(self) -> str:
        fmt = self.cfg.format
        if fmt == "json":
            payload = {
                "schema_version": SCHEMA_VERSION,
                "command": self.command,
                "config": self.cfg.as_dict(),
                "meta": self.meta,
                "rows": self.rows,
            }
            return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
        if fmt == "csv":
            buf = io.StringIO()
            w = csv.DictWriter(buf, fieldnames=self.columns, extrasaction="ignore", lineterminator="\n")
            w.writeheader()
            for r in self.rows:
                w.writerow({c: _csv_cell(r.get(c, "")) for c in self.columns})
            return buf.getvalue()
        lines = []
        for key, val in self.meta.items():
            lines.append(f"{key}: {val}")
        if self.rows:
            widths = {c: max(len(c), *(len(str(r.get(c, ""))) for r in self.rows)) for c in self.columns}
            lines.append("  ".join(c.ljust(widths[c]) for c in self.columns).rstrip())
            for r in self.rows:
                lines.append("  ".join(str(r.get(c, "")).ljust(widths[c]) for c in self.columns).rstrip())
        lines.extend(self.notes)
        return "\n".join(lines) + "\n"


def _csv_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    return v


def cmd_coeff(args, cfg: RunConfig) -> tuple[int, Output]:
    key = CoeffKey(args.k, args.n)
    i, e = key.reduce()
    if args.q is not None:
        out = Output("coeff", cfg, ["k", "n", "q", "value", "radius"])
        q = Fraction(args.q)
        v = gamma_eval(key, q, cfg.prec, N=cfg.order)
        out.add(k=args.k, n=args.n, q=args.q, **_value_fields(v, cfg.precision))
    else:
        N = 20 if cfg.order is None else cfg.order
        out = Output("coeff", cfg, ["m", "coeff"])
        series, hit = SeriesCache(cfg.cache_dir).series(key, N)
        for m, c in enumerate(series.coeffs):
            out.add(m=m, coeff=str(c))
        log.debug("series %s from %s", key, "cache" if hit else "computation")
        out.meta["order"] = N
    out.meta["key"] = f"gamma_{{{args.k},{args.n}}}"
    if (i, e) != (args.n, 0):
        out.meta["reduced"] = f"gamma_{{{args.k},{args.n}}} = q^{e} gamma_{{{args.k},{i}}}"
    return EXIT_OK, out


def cmd_verify(args, cfg: RunConfig) -> tuple[int, Output]:
    out = Output("verify", cfg, ["check", "passed", "residual", "radius", "detail"])
    checks = run_suite(args.suite, cfg.prec, cfg.seed)
    for c in checks:
        out.add(
            check=c.name,
            passed=bool(c.passed),
            residual="" if c.residual is None else mp.nstr(c.residual, 4),
            radius="" if c.radius is None else mp.nstr(c.radius, 4),
            detail=c.detail,
        )
    failed = sum(not c.passed for c in checks)
    out.meta["suite"] = args.suite
    out.meta["summary"] = f"{len(checks) - failed}/{len(checks)} passed"
    return (EXIT_FAIL if failed else EXIT_OK), out


def _small_k_verdict(k: int) -> str:
    if k == 1:
        return "constant series (gamma_{1,n} = q^{n(n-1)/2})"
    return "non-vanishing route (triple product)"


def cmd_zeros(args, cfg: RunConfig) -> tuple[int, Output]:
    out = Output("zeros", cfg, ["k", "n", "lo", "hi", "sign_lo", "sign_hi", "lo_exact", "hi_exact"])
    window = _parse_window(args.window)
    width = Fraction(args.width)
    if not 0 <= args.n < args.k:
        raise ArgError("zeros needs 0 <= n < k")
    if args.k >= 3:
        v = classify(args.k, args.n)
        out.meta["verdict"] = v.verdict.value
        out.meta["corollary_flag"] = v.corollary_flag
    else:
        out.meta["verdict"] = _small_k_verdict(args.k)
    try:
        brackets = find_zeros(args.k, args.n, cfg.prec, window=window, grid=args.grid, width=width)
    except ContradictionError as exc:
        out.meta["contradiction"] = str(exc)
        return EXIT_CONTRADICTION, out
    for b in brackets:
        out.add(
            k=b.k,
            n=b.n,
            lo=_frac_dec(b.lo, rounding="floor"),
            hi=_frac_dec(b.hi, rounding="ceil"),
            sign_lo=b.sign_lo,
            sign_hi=b.sign_hi,
            lo_exact=str(b.lo),
            hi_exact=str(b.hi),
        )
    out.meta["brackets"] = len(brackets)
    if brackets.gaps:
        out.meta["uncertified"] = [[_frac_dec(a), _frac_dec(b, rounding="ceil")] for a, b in brackets.gaps]
    return EXIT_OK, out


def cmd_classify(args, cfg: RunConfig) -> tuple[int, Output]:
    cols = ["k", "n", "verdict", "corollary_flag", "complementary_flag", "predicted_constant", "case"]
    out = Output("classify", cfg, cols)
    ks = _parse_krange(args.k)
    if ks.start < 3 or len(ks) == 0:
        raise ArgError("classify needs 3 <= k")
    sets = {}
    for k in ks:
        ns = range(k) if args.n is None else [args.n]
        for n in ns:
            if not 0 <= n < k:
                raise ArgError(f"n={n} outside [0, {k})")
            v = classify(k, n)
            out.add(
                k=k,
                n=n,
                verdict=v.verdict.value,
                corollary_flag=v.corollary_flag,
                complementary_flag=v.complementary_flag,
                predicted_constant="" if v.predicted_constant is None else _dec(v.predicted_constant, 12),
                case=v.case,
            )
        X, Y = vanishing_sets(k)
        sets[str(k)] = {"X": sorted(X), "Y": str(Y)}
    out.meta["vanishing_sets"] = sets
    if cfg.format == "text":
        out.meta.pop("vanishing_sets")
        out.notes = [f"X_{k} = {{{', '.join(map(str, s['X']))}}}, Y_{k} = {s['Y']}" for k, s in sets.items()]
    return EXIT_OK, out


def cmd_asymptote(args, cfg: RunConfig) -> tuple[int, Output]:
    out = Output("asymptote", cfg, ["t", "gamma", "gamma_radius", "profile", "ratio"])
    ts = _parse_list(args.t, Fraction)
    if any(t <= 0 for t in ts):
        raise ArgError("t values must be positive")
    prec = cfg.prec
    with prec.context():
        for t in ts:
            tm = mp.mpf(t.numerator) / t.denominator
            q = -mp.exp(-2 * mp.pi * tm)
            g = gamma_eval(CoeffKey(args.k, args.n), ErrValue(q, 4 * mp.eps * abs(q)), prec)
            G = gamma_profile(args.k, args.n, tm)
            f = _value_fields(g, cfg.precision)
            out.add(t=str(t), gamma=f["value"], gamma_radius=f["radius"], profile=_dec(G, 20), ratio=_dec(g.value / G, 20))
    if args.k >= 3 and 0 <= args.n < args.k:
        v = classify(args.k, args.n)
        out.meta["verdict"] = v.verdict.value
        if v.predicted_constant is not None:
            out.meta["predicted_ratio"] = _dec(v.predicted_constant, 12)
    return EXIT_OK, out


def cmd_lattice(args, cfg: RunConfig) -> tuple[int, Output]:
    out = Output("lattice", cfg, ["M", "count", "volume"])
    form = ThetaPowerForm(args.k, args.n).quad_lin()
    for M in _parse_list(args.M, Fraction):
        out.add(M=str(M), count=str(lattice_count(form, M)), volume=_dec(ellipsoid_volume(form, M), 20))
    out.meta["form"] = f"Q_{args.k}(m) - {args.n}*S(m)"
    return EXIT_OK, out


def _seed(s: str) -> int:
    try:
        return int(s, 16) if not s.lower().startswith("0x") else int(s, 0)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad seed {s!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=50, help="decimal digits (>= 15)")
    common.add_argument("--order", type=int, default=None, help="series order N (default: automatic)")
    common.add_argument("--format", choices=["text", "csv", "json"], default="text")
    common.add_argument("--cache-dir", default="./cache")
    common.add_argument("--seed", type=_seed, default=0x5EED, help="hex seed for sampled checks")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(
        prog="thetapow",
        description="Coefficients of powers of Jacobi theta functions.",
        epilog=__doc__.split("CSV columns:")[1].join(["CSV columns:", ""]),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("coeff", parents=[common], help="series or value of gamma_{k,n}")
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--q", default=None, help="evaluate at this rational q instead of printing the series")
    c.set_defaults(func=cmd_coeff)

    v = sub.add_parser("verify", parents=[common], help="run an invariant suite")
    v.add_argument("suite", choices=sorted(SUITES))
    v.set_defaults(func=cmd_verify)

    z = sub.add_parser("zeros", parents=[common], help="certified real zeros on (-1, 0)")
    z.add_argument("--k", type=int, required=True)
    z.add_argument("--n", type=int, required=True)
    z.add_argument("--window", default="-0.999:-0.001")
    z.add_argument("--width", default="1e-8")
    z.add_argument("--grid", type=int, default=DEFAULT_GRID)
    z.set_defaults(func=cmd_zeros)

    k = sub.add_parser("classify", parents=[common], help="limit behaviour at q = -1")
    k.add_argument("--k", required=True, help="k or a:b")
    k.add_argument("--n", type=int, default=None)
    k.set_defaults(func=cmd_classify)

    a = sub.add_parser("asymptote", parents=[common], help="gamma / Gamma sweep in t")
    a.add_argument("--k", type=int, required=True)
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--t", default="0.1,0.07,0.05,0.03,0.02", help="comma-separated t values")
    a.set_defaults(func=cmd_asymptote)

    lt = sub.add_parser("lattice", parents=[common], help="lattice counts against ellipsoid volumes")
    lt.add_argument("--k", type=int, required=True)
    lt.add_argument("--n", type=int, default=0)
    lt.add_argument("--M", default="25,50,100,200,400", help="comma-separated bounds")
    lt.set_defaults(func=cmd_lattice)
    return p


def _join_window(argv: list[str]) -> list[str]:
    # "-0.9:-0.1" starts with a dash but is not a negative number to argparse
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--window":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--window={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(_join_window(sys.argv[1:] if argv is None else list(argv)))
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    logging.captureWarnings(True)
    try:
        cfg = RunConfig(args.precision, args.order, args.format, args.cache_dir, args.seed)
        cfg.prec  # validates the digit count
        code, out = args.func(args, cfg)
    except (ArgError, DomainError, ScaleError, NonconvergenceError, ValueError) as exc:
        print(f"thetapow: error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except PrecisionCeilingError as exc:
        print(f"thetapow: precision ceiling: {exc}", file=sys.stderr)
        return EXIT_CEILING
    sys.stdout.write(out.render())
    return code


if __name__ == "__main__":
    sys.exit(main())
