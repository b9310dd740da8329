"""Command-line front end: ``ffcircle verify``, ``ffcircle report`` and friends.

Exit codes: 0 pass, 1 a checked identity failed, 2 usage error, 3 count limit.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from . import __version__
from .arcs import ArcScale, classify
from .config import CONFORMING, NONCONFORMING, Overrides, set_count_limit, stamp
from .errors import CountLimitError, PrecisionError, RangeError
from .ergodic import build_translation_system, convergence_probe, oscillation_experiment
from .expsum import ExponentSystem, fit_gauss_decay, fit_gauss_decay_with_constant, gauss_table
from .ffpoly import FieldParams, parse_poly
from .inverse import approx_need, best_rational_approx, decay_profile, k_star, maximal_elements, \
    minor_arc_scan, shadow, verify_weyl_inverse
from .suites import DEFAULT_SEED, SUITES, run_suite
from .torus import parse_tail

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3

# flag name -> default; None-valued flags are filled from --config first
_DEFAULTS = {"field": "2", "exponents": "1", "n": None, "s": None, "seed": DEFAULT_SEED,
             "limit": None, "override_rho": None, "format": "csv", "out": None}


class UsageError(Exception):
    pass


def parse_field(text: str) -> FieldParams:
    """"p" or "p,m,modulus" with the modulus written as a polynomial over F_p, e.g. "2,2,t^2+t+1"."""
    parts = [x.strip() for x in str(text).split(",")]
    try:
        p = int(parts[0])
        if len(parts) == 1:
            return FieldParams(p)
        if len(parts) != 3:
            raise UsageError("--field takes p or p,m,modulus")
        m = int(parts[1])
        mod = parse_poly(FieldParams(p), parts[2])
        return FieldParams(p, m, tuple(mod.coeffs) + (0,) * (m + 1 - len(mod.coeffs)))
    except ValueError as exc:
        raise UsageError(f"bad --field {text!r}: {exc}") from exc


def parse_ints(text: str) -> list[int]:
    try:
        return [int(x) for x in str(text).replace(" ", "").split(",") if x]
    except ValueError as exc:
        raise UsageError(f"expected a comma-separated integer list, got {text!r}") from exc


def parse_range(text: str) -> list[int]:
    """"a:b" (inclusive), "a,b,c" or a single integer."""
    t = str(text).replace(" ", "")
    if ":" in t:
        a, b = t.split(":")
        return list(range(int(a), int(b) + 1))
    return parse_ints(t)


# -- output ---------------------------------------------------------------------------------------

def _fmt(v: Any) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    if v is None:
        return ""
    return str(v)


def emit(args, meta: dict, header: Sequence[str], rows: Sequence[Sequence], payload: Any) -> None:
    """Write one artifact in the requested format; every format carries ``meta``."""
    fmt = args.format
    if fmt == "json":
        text = json.dumps({"meta": meta, "data": payload}, indent=2, sort_keys=True,
                          default=str) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        for k in sorted(meta):
            buf.write(f"# {k}: {_fmt(meta[k]) if not isinstance(meta[k], (dict, list)) else json.dumps(meta[k], sort_keys=True, default=str)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
        text = buf.getvalue()
    elif fmt == "table":
        cells = [list(header)] + [[_fmt(v) for v in r] for r in rows]
        widths = [max(len(c[i]) for c in cells) for i in range(len(header))] if header else []
        lines = [f"{k}: {meta[k]}" for k in sorted(meta)]
        for c in cells:
            lines.append("  ".join(x.rjust(wd) for x, wd in zip(c, widths)))
        text = "\n".join(lines) + "\n"
    else:
        raise UsageError(f"unknown format {fmt!r}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def base_meta(args, system: ExponentSystem | None = None, **extra) -> dict:
    meta = {"version": __version__, "command": args.command, "field": str(args.field_params),
            "seed": args.seed, "limit": args.limit, "stamp": stamp(args.overrides)}
    if system is not None:
        meta["K"] = list(system.exponents)
    if args.overrides is not None and args.overrides.active:
        meta["overrides"] = {"rho": str(args.overrides.rho)}
    meta.update(extra)
    return meta


def _stamp_with(args, *stamps: str) -> str:
    own = stamp(args.overrides)
    return NONCONFORMING if NONCONFORMING in (own,) + stamps else CONFORMING


# -- subcommands ----------------------------------------------------------------------------------

def cmd_verify(args) -> int:
    results = run_suite(args.suite, seed=args.seed)
    meta = base_meta(args, suite=args.suite,
                     stamp=_stamp_with(args, *(r.stamp for r in results)))
    rows = [[r.name, "pass" if r.passed else "FAIL", r.checked, len(r.failures),
             "; ".join(r.skipped), r.stamp] for r in results]
    emit(args, meta, ["suite", "result", "checked", "failures", "skipped", "stamp"], rows,
         [r.to_json() for r in results])
    if any(r.skipped for r in results):
        return EXIT_LIMIT
    return EXIT_PASS if all(r.passed for r in results) else EXIT_FAIL


def _report_gauss(args, system):
    top = args.s if args.s is not None else 4
    tables = [gauss_table(s, system) for s in range(0, top + 1)]
    gamma = fit_gauss_decay(tables)
    with_c = fit_gauss_decay_with_constant(tables)
    meta = base_meta(args, system, s_max=top, gamma_hat=gamma,
                     gamma_with_constant=None if with_c is None else with_c[0],
                     log_q_constant=None if with_c is None else with_c[1])
    header = ["s", "h"] + [f"a{i + 1}" for i in range(system.k)] + ["re", "im", "abs", "max_abs"]
    rows = []
    for t in tables:
        for r in t.rows:
            v = r.value
            rows.append([r.s, str(r.h)] + [str(x) for x in r.a] + [v.real + 0.0, v.imag + 0.0, abs(v), t.max_abs])
    if args.exact:
        payload = [{"s": r.s, "h": str(r.h), "a": [str(x) for x in r.a], "counts": list(r.exact.counts)}
                   for t in tables for r in t.rows]
    else:
        payload = [{"s": t.s, "centers": len(t.rows), "maxAbs": t.max_abs} for t in tables]
    emit(args, meta, header, rows, payload)
    return EXIT_PASS


def _report_decay(args, system):
    ns = parse_range(args.n_range) if args.n_range else [args.n or 14]
    deltas = parse_range(args.delta_range) if args.delta_range else list(range(0, max(ns) // 2 + 1))
    prof = decay_profile(system, system.field, args.index, ns, deltas, samples=args.samples,
                         seed=args.seed)
    meta = base_meta(args, system, c_hat=prof.c_hat, intercept=prof.intercept, index=args.index,
                     samples=args.samples)
    rows = [[r.n, r.delta, r.max_abs, r.samples, r.flag] for r in prof.rows]
    emit(args, meta, ["n", "delta", "max_abs", "samples", "flag"], rows, prof.to_json())
    return EXIT_PASS


def _report_inverse(args, system):
    rep = verify_weyl_inverse(system, system.field, args.n or 8, trials=args.trials,
                              eta_max=args.eta_max, seed=args.seed)
    meta = base_meta(args, system, n=args.n or 8, C_hat=rep.C_hat, D_hat=rep.D_hat,
                     D_cover=rep.D_cover, excluded_zero=rep.excluded_zero,
                     all_satisfied=rep.all_satisfied)
    rows = [[f"{s.eta:.12g}", max(s.needs), s.kind] for s in rep.samples]
    emit(args, meta, ["eta", "need", "kind"], rows, rep.to_json())
    return EXIT_PASS if rep.all_satisfied else EXIT_FAIL


def _system_for(args, system):
    field = system.field
    h = parse_poly(field, args.modulus)
    return build_translation_system(h, d=system.k)


def _report_oscillation(args, system):
    X = _system_for(args, system)
    rng = np.random.default_rng(args.seed)
    g = rng.integers(0, 5, size=X.size)
    n_max = args.n or X.h.deg + 3
    exp = oscillation_experiment(X, g, system, n_max, cut_samples=args.samples, seed=args.seed)
    meta = base_meta(args, system, modulus=str(X.h), n_max=n_max, max_ratio=exp.max_ratio,
                     stabilization=exp.stabilization)
    rows = [[i, r] for i, r in enumerate(exp.ratios)]
    emit(args, meta, ["family", "ratio"], rows, exp.to_json())
    return EXIT_PASS


def _report_minor(args, system):
    ns = parse_range(args.n_range) if args.n_range else list(range(8, (args.n or 14) + 1))
    scan = minor_arc_scan(system, system.field, ns, samples=args.samples, seed=args.seed,
                          overrides=args.overrides)
    meta = base_meta(args, system, slope=scan.slope, samples=args.samples)
    emit(args, meta, ["n", "max_abs", "minor_samples"], [list(r) for r in scan.rows], scan.to_json())
    return EXIT_PASS


REPORTS = {"gauss": _report_gauss, "decay": _report_decay, "inverse": _report_inverse,
           "oscillation": _report_oscillation, "minor-arc-scan": _report_minor}


def cmd_report(args) -> int:
    return REPORTS[args.kind](args, args.system)


def cmd_shadow(args) -> int:
    p = args.field_params.p
    K = args.system.exponents
    sh = sorted(shadow(K, p))
    meta = base_meta(args, args.system, p=p, maximal=sorted(maximal_elements(K, p)))
    emit(args, meta, ["j"], [[j] for j in sh], {"shadow": sh})
    return EXIT_PASS


def cmd_kstar(args) -> int:
    p = args.field_params.p
    ks = sorted(k_star(args.system.exponents, p))
    meta = base_meta(args, args.system, p=p)
    emit(args, meta, ["k"], [[k] for k in ks], {"kStar": ks})
    return EXIT_PASS


def cmd_approx(args) -> int:
    field = args.field_params
    alpha = parse_tail(field, args.alpha, args.precision)
    w = best_rational_approx(alpha, args.rn, args.max_deg)
    need, _ = approx_need(alpha, args.rn, args.max_deg)
    meta = base_meta(args, alpha=args.alpha, precision=alpha.precision, rn=args.rn,
                     max_deg=args.max_deg, need=need)
    j = w.to_json()
    emit(args, meta, ["g", "a", "ord_gap", "deg_g"], [[j["g"], j["a"], j["ordGap"], j["degG"]]], j)
    return EXIT_PASS


def cmd_inverse_verify(args) -> int:
    return _report_inverse(args, args.system)


def cmd_decay(args) -> int:
    return _report_decay(args, args.system)


def cmd_ergodic_sim(args) -> int:
    system = args.system
    X = _system_for(args, system)
    rng = np.random.default_rng(args.seed)
    g = rng.integers(0, 5, size=X.size)
    n_max = args.n or X.h.deg + 3
    tr = convergence_probe(X, g, system, n_max)
    meta = base_meta(args, system, modulus=str(X.h), n_max=n_max, stabilization=tr.stabilization,
                     invariant=tr.invariant)
    rows = [[n, x, float(np.real(v[x]))] for n, v in enumerate(tr.values) for x in range(X.size)]
    emit(args, meta, ["n", "x", "average"], rows, tr.to_json())
    return EXIT_PASS if tr.stabilization is not None and tr.stabilization <= X.h.deg else EXIT_FAIL


def cmd_classify(args) -> int:
    system = args.system
    coords = [parse_tail(system.field, a, args.precision) for a in args.alpha.split(";")]
    if len(coords) != system.k:
        raise UsageError(f"need {system.k} coordinates separated by ';'")
    n = args.n or 8
    scale = ArcScale(n, system, args.overrides)
    v = classify(coords, scale)
    meta = base_meta(args, system, n=n, stamp=_stamp_with(args, scale.stamp))
    center = None if v.center is None else str(v.center)
    emit(args, meta, ["alpha", "verdict", "center"], [[args.alpha, "major" if v.major else "minor", center]],
         {"alpha": args.alpha, "major": v.major, "center": center})
    return EXIT_PASS


COMMANDS = {"verify": cmd_verify, "report": cmd_report, "shadow": cmd_shadow, "kstar": cmd_kstar,
            "approx": cmd_approx, "inverse-verify": cmd_inverse_verify, "decay": cmd_decay,
            "ergodic-sim": cmd_ergodic_sim, "classify": cmd_classify}


# -- parser ---------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--field", default=None, help="p or p,m,modulus (default 2)")
    g.add_argument("--exponents", default=None, help="comma-separated K (default 1)")
    g.add_argument("--n", type=int, default=None)
    g.add_argument("--s", type=int, default=None)
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--limit", type=int, default=None, help="enumeration count limit")
    g.add_argument("--override-rho", default=None, help="replace rho (marks output nonconforming)")
    g.add_argument("--format", choices=["csv", "json", "table"], default=None)
    g.add_argument("--out", default=None)
    g.add_argument("--config", default=None, help="key = value file; flags win")
    g.add_argument("--exact", action="store_true", help="emit Gauss sums as cyclotomic counts")

    parser = argparse.ArgumentParser(prog="ffcircle", description="Function-field circle method toolkit")
    parser.add_argument("--version", action="version", version=f"ffcircle {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=list(SUITES) + ["all"])

    p = sub.add_parser("report", parents=[common], help="emit an experiment table")
    p.add_argument("kind", choices=list(REPORTS))
    _experiment_opts(p)

    for name in ("shadow", "kstar"):
        sub.add_parser(name, parents=[common])

    p = sub.add_parser("approx", parents=[common], help="best rational approximation of a tail")
    p.add_argument("alpha", help='e.g. "t^-1+t^-5"')
    p.add_argument("--precision", type=int, default=None)
    p.add_argument("--rn", type=int, default=0)
    p.add_argument("--max-deg", type=int, default=1)

    p = sub.add_parser("inverse-verify", parents=[common])
    _experiment_opts(p)
    p = sub.add_parser("decay", parents=[common])
    _experiment_opts(p)
    p = sub.add_parser("ergodic-sim", parents=[common])
    _experiment_opts(p)

    p = sub.add_parser("classify", parents=[common], help="major or minor arc at scale n")
    p.add_argument("alpha", help='coordinates separated by ";", e.g. "t^-1;t^-3"')
    p.add_argument("--precision", type=int, default=None)
    return parser


def _experiment_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n-range", default=None, help='"a:b" or "a,b,c"')
    p.add_argument("--delta-range", default=None)
    p.add_argument("--index", type=int, default=0, help="coordinate i for decay")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--eta-max", type=float, default=None)
    p.add_argument("--modulus", default="t^2+t+1", help="h for the finite system F_q[t]/h")


def _apply_config(args) -> None:
    if args.config:
        cp = configparser.ConfigParser()
        with open(args.config, encoding="utf-8") as fh:
            cp.read_string("[ffcircle]\n" + fh.read())
        for key, value in cp["ffcircle"].items():
            attr = key.replace("-", "_")
            if not hasattr(args, attr):
                raise UsageError(f"unknown config key {key!r}")
            if getattr(args, attr) is None:
                current = _DEFAULTS.get(attr)
                setattr(args, attr, int(value) if isinstance(current, int) or attr in ("n", "s", "limit")
                        else value)
    for k, v in _DEFAULTS.items():
        if getattr(args, k, None) is None:
            setattr(args, k, v)


def _prepare(args) -> None:
    _apply_config(args)
    args.field_params = parse_field(args.field)
    try:
        args.system = ExponentSystem(tuple(parse_ints(args.exponents)), args.field_params)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    args.overrides = None
    if args.override_rho is not None:
        try:
            args.overrides = Overrides(rho=Fraction(args.override_rho))
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad --override-rho: {exc}") from exc
    if args.limit is not None:
        set_count_limit(args.limit)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _prepare(args)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"ffcircle: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CountLimitError as exc:
        print(f"ffcircle: limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (ValueError, RangeError, PrecisionError) as exc:
        print(f"ffcircle: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
