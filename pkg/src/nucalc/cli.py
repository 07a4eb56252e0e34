"""``nucalc`` command line.

Every command prints JSON (one record per line, floats in shortest
round-trip form) on stdout and diagnostics on stderr.  Exit codes:

    0  success
    1  verification found failing cases
    2  usage, parse or domain error
    3  non-convergence
    4  unsupported regime
    5  I/O failure
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import math
import sys

from . import __version__
from .config import Config, load_config
from .errors import (
    ConvergenceError,
    IoError,
    NuCalcError,
    SearchFailure,
    UnsupportedRegimeError,
)
from .expr import parse
from .harness import run_suite
from .mittag_leffler import ml1, ml3, ml_extended, ml_extended_gen, ml_truncated
from .nu_calculus import deriv_chain, deriv_limit, deriv_n, integral
from .special_functions import MLParams, beta_fn, extended_beta, gamma_fn

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CONVERGENCE, EXIT_UNSUPPORTED, EXIT_IO = range(6)

# flags each --fn needs, in the order they are passed to the library
_EVAL_FLAGS = {
    "gamma": ("x",),
    "beta": ("z", "y"),
    "extbeta": ("z", "y", "p"),
    "ml1": ("alpha", "z"),
    "ml3": ("rho", "lambda_", "delta", "z"),
    "mlext": ("theta", "vartheta", "nu", "c", "p", "x"),
    "mlextgen": ("mu", "delta", "vartheta", "q", "c", "p", "z"),
    "mltrunc": ("i", "z"),
}


class _UsageError(Exception):
    pass


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else repr(x)


def _emit(record, out) -> None:
    out.write(json.dumps(record) + "\n")


def _params(args, cfg: Config) -> MLParams:
    return MLParams.parse(args.params) if args.params else cfg.params


def _need(args, names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        flags = ", ".join("--" + n.rstrip("_").replace("_", "-") for n in missing)
        raise _UsageError(f"--fn {args.fn} requires {flags}")


def cmd_eval(args, cfg: Config, out) -> int:
    _need(args, _EVAL_FLAGS[args.fn])
    fn = args.fn
    rec = {"fn": fn}
    if fn == "gamma":
        rec["value"] = gamma_fn(args.x)
    elif fn == "beta":
        rec["value"] = beta_fn(args.z, args.y)
    elif fn == "extbeta":
        res = extended_beta(args.z, args.y, args.p, cfg.quad, full_output=True)
        rec.update(value=res.value, abs_error=res.abs_error)
    elif fn == "mltrunc":
        if args.i != int(args.i):
            raise _UsageError("--i must be an integer")
        rec["value"] = ml_truncated(int(args.i), _params(args, cfg), args.z, cfg.quad)
    else:
        if fn == "ml1":
            res = ml1(args.alpha, args.z, cfg.series)
        elif fn == "ml3":
            res = ml3(args.rho, args.lambda_, args.delta, args.z, cfg.series)
        elif fn == "mlext":
            res = ml_extended(args.theta, args.vartheta, args.nu, args.c, args.p, args.x,
                              cfg.series, cfg.quad)
        else:
            res = ml_extended_gen(args.mu, args.delta, args.vartheta, args.q, args.c, args.p,
                                  args.z, cfg.series, cfg.quad)
        rec.update(value=res.value, terms_used=res.terms_used, tail_estimate=res.tail_estimate)
    _emit({k: (_num(v) if isinstance(v, float) else v) for k, v in rec.items()}, out)
    return EXIT_OK


def cmd_deriv(args, cfg: Config, out) -> int:
    f = parse(args.expr)
    params = _params(args, cfg)
    if args.n is not None:
        # n >= 2 keeps the coarser built-in schedule (finite-differenced g^(n))
        sched = cfg.sched if args.n < 2 else None
        res = deriv_n(f, args.t, args.mu, args.n, params, args.i, sched, cfg.quad)
        _emit(_limit_record("nth", res, n=args.n), out)
    elif args.method == "chain":
        _emit({"method": "chain", "value": _num(deriv_chain(f, args.t, args.mu, params, cfg.quad))}, out)
    else:
        res = deriv_limit(f, args.t, args.mu, params, args.i, cfg.sched, cfg.quad)
        _emit(_limit_record("limit", res), out)
    return EXIT_OK


def _limit_record(method, res, **extra):
    rec = {"method": method, "value": _num(res.value), **extra,
           "observed_order": _num(res.observed_order),
           "per_eps": [[_num(e), _num(d)] for e, d in res.per_eps]}
    return rec


def cmd_integ(args, cfg: Config, out) -> int:
    f = parse(args.expr)
    res = integral(f, args.a, args.t, args.mu, _params(args, cfg), cfg.quad, full_output=True)
    _emit({"value": _num(res.value), "abs_error": _num(res.abs_error)}, out)
    return EXIT_OK


def cmd_verify(args, cfg: Config, out) -> int:
    if args.cases < 1:
        raise _UsageError(f"--cases must be at least 1, got {args.cases}")
    report = run_suite(args.seed, args.cases, args.out)
    by = report.by_theorem()
    failed = sorted({c.theorem_id for c in report.failures()})
    _emit({"seed": args.seed, "n_cases": args.cases, "report": args.out,
           "theorems": len(by), **report.totals, "failed_theorems": failed}, out)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_table(args, cfg: Config, out) -> int:
    if args.steps < 2:
        raise _UsageError(f"--steps must be at least 2, got {args.steps}")
    if not args.t_min < args.t_max:
        raise _UsageError(f"need --t-min < --t-max, got {args.t_min} and {args.t_max}")
    if args.op in ("deriv", "integ") and not args.expr:
        raise _UsageError(f"--op {args.op} requires --expr")
    params = _params(args, cfg)
    n = args.steps
    span = args.t_max - args.t_min
    ts = [args.t_min + span * k / (n - 1) for k in range(n)]
    ts[-1] = args.t_max
    rows = []
    if args.op == "deriv":
        f = parse(args.expr)
        for t in ts:
            pair = f.eval_d(t)
            rows.append({"t": t, "value": deriv_chain(f, t, args.mu, params, cfg.quad),
                         "f": pair.value, "df": pair.derivative})
    elif args.op == "integ":
        f = parse(args.expr)
        a = args.t_min if args.a is None else args.a
        for t in ts:
            res = integral(f, a, t, args.mu, params, cfg.quad, full_output=True)
            rows.append({"t": t, "value": res.value, "abs_error": res.abs_error})
    else:
        for t in ts:
            res = ml3(args.rho, args.lambda_, args.delta, t, cfg.series)
            rows.append({"t": t, "value": res.value, "terms_used": res.terms_used,
                         "tail_estimate": res.tail_estimate})
    if args.format == "json":
        _emit([{k: (_num(v) if isinstance(v, float) else v) for k, v in r.items()} for r in rows], out)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(rows[0]))
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, float) else v for v in r.values()])
        out.write(buf.getvalue())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value defaults file (else $NUCALC_CONFIG)")
    common.add_argument("--params", help="alpha,beta,gamma,c[,p]; default 1,1,1,2,0")

    p = argparse.ArgumentParser(prog="nucalc", description="Truncated nu-fractional calculus toolkit.")
    p.add_argument("--version", action="version", version=f"nucalc {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", parents=[common], help="special functions and MLF series")
    e.add_argument("--fn", required=True, choices=sorted(_EVAL_FLAGS))
    for name in ("x", "y", "z", "p", "alpha", "rho", "delta", "theta", "vartheta",
                 "nu", "c", "mu", "q", "i"):
        e.add_argument(f"--{name}", type=float)
    e.add_argument("--lambda", dest="lambda_", type=float)
    e.set_defaults(handler=cmd_eval)

    d = sub.add_parser("deriv", parents=[common], help="nu-derivative of an expression")
    d.add_argument("--expr", required=True)
    d.add_argument("--t", type=float, required=True)
    d.add_argument("--mu", type=float, required=True)
    d.add_argument("--method", choices=("chain", "limit"), default="chain")
    d.add_argument("--i", type=int, default=1, help="truncation index of the limit form")
    d.add_argument("--n", type=int, help="n-th order limit form (n < mu <= n+1)")
    d.set_defaults(handler=cmd_deriv)

    g = sub.add_parser("integ", parents=[common], help="nu-integral of an expression")
    g.add_argument("--expr", required=True)
    g.add_argument("--a", type=float, required=True)
    g.add_argument("--t", type=float, required=True)
    g.add_argument("--mu", type=float, required=True)
    g.set_defaults(handler=cmd_integ)

    v = sub.add_parser("verify", parents=[common], help="run the identity suite")
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--cases", type=int, default=25)
    v.add_argument("--out", default="nucalc_report.jsonl")
    v.set_defaults(handler=cmd_verify)

    tb = sub.add_parser("table", parents=[common], help="values on a grid of t")
    tb.add_argument("--expr")
    tb.add_argument("--op", choices=("deriv", "integ", "ml3"), required=True)
    tb.add_argument("--t-min", type=float, required=True)
    tb.add_argument("--t-max", type=float, required=True)
    tb.add_argument("--steps", type=int, required=True, help="number of grid points")
    tb.add_argument("--mu", type=float, default=0.5)
    tb.add_argument("--a", type=float, help="lower limit for --op integ (default t-min)")
    tb.add_argument("--rho", type=float, default=1.0)
    tb.add_argument("--lambda", dest="lambda_", type=float, default=1.0)
    tb.add_argument("--delta", type=float, default=1.0)
    tb.add_argument("--format", choices=("csv", "json"), default="csv")
    tb.set_defaults(handler=cmd_table)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        # argparse prints usage and --help itself; keep that on our streams
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(args.config)
        return args.handler(args, cfg, out)
    except _UsageError as exc:
        err.write(f"nucalc: {exc}\n")
        return EXIT_USAGE
    except UnsupportedRegimeError as exc:
        err.write(f"nucalc: unsupported regime: {exc}\n")
        return EXIT_UNSUPPORTED
    except (ConvergenceError, SearchFailure) as exc:
        err.write(f"nucalc: no convergence: {exc}\n")
        return EXIT_CONVERGENCE
    except (IoError, OSError) as exc:
        err.write(f"nucalc: I/O error: {exc}\n")
        return EXIT_IO
    except (NuCalcError, ValueError, OverflowError) as exc:
        err.write(f"nucalc: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
