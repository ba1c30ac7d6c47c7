"""Command-line front end.

Subcommands: reduce, classgroup, count, pif, sieve, verify, family.
Exit codes: 0 on success, 2 on usage/validation errors, 3 when a verification
sweep contains a failing row.  CSV output always carries a header row; floats
are printed with 10 significant digits and booleans as 0/1.  JSON output is
versioned under "schema": "bqf-sieve/1".  The environment variable
BQF_THREADS overrides --jobs.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

from . import __version__
from .characters import average_exceptional_report
from .forms import Form, delta_f, enumerate_class_set, is_primitive, reduce_form
from .lattice import EllipseWindow, count_congruence, local_density_report
from .sieve import SieveParams, pi_f, pi_f_interval, selberg_upper_bound
from .sweeps import CSV_COLUMNS, RuleError, SweepConfig, SweepRecord, run_sweep

EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED = 0, 2, 3


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return "%.10g" % v
    return str(v)


def _parse_form(args) -> Form:
    return Form(args.a, args.b, args.c)


def cmd_reduce(args) -> int:
    f = _parse_form(args)
    r = reduce_form(f)
    out = {"a": r.a, "b": r.b, "c": r.c, "D": r.D,
           "delta": delta_f(r), "primitive": is_primitive(r)}
    if args.format == "json":
        print(json.dumps({"schema": "bqf-sieve/1", "reduce": out}))
    else:
        print("(%d,%d,%d) D=%d delta=%s primitive=%s"
              % (r.a, r.b, r.c, r.D, _fmt(out["delta"]), _fmt(out["primitive"])))
    return EXIT_OK


def cmd_classgroup(args) -> int:
    cs = enumerate_class_set(args.D)
    if args.format == "json":
        print(json.dumps({"schema": "bqf-sieve/1", "D": cs.D, "h": cs.h, "w": cs.w,
                          "forms": [f.triple() for f in cs.reduced_forms]}))
    else:
        for f in cs.reduced_forms:
            print("(%d,%d,%d) delta=%s" % (f.a, f.b, f.c, _fmt(delta_f(f))))
        print("h(-%d) = %d, w = %d" % (cs.D, cs.h, cs.w))
    return EXIT_OK


def cmd_count(args) -> int:
    f = _parse_form(args)
    window = EllipseWindow.of(f, args.x)
    cc = count_congruence(window, args.ell)
    rep = local_density_report(window, args.ell)
    if args.format == "json":
        print(json.dumps({"schema": "bqf-sieve/1", "form": f.triple(),
                          "x": args.x, "ell": args.ell, "counts": cc.counts,
                          "local_density": {"exact": rep.exact, "main": rep.main,
                                            "residual": rep.residual,
                                            "envelope": rep.envelope}}))
    else:
        for label, n in cc.counts.items():
            print(f"{label} = {n}")
        print("M(%d) = %d, roots = %s" % (args.ell, cc.roots.M, list(cc.roots.roots)))
        print("main = %s  residual = %s  envelope = %s  ratio = %s"
              % (_fmt(rep.main), _fmt(rep.residual), _fmt(rep.envelope),
                 _fmt(rep.ratio)))
    return EXIT_OK


def _Li(x: float) -> float:
    from scipy.special import expi

    return float(expi(math.log(x)) - expi(math.log(2))) if x > 2 else 0.0


def cmd_pif(args) -> int:
    f = _parse_form(args)
    if not is_primitive(f):
        raise ValueError("pi_f needs a primitive form")
    cs = enumerate_class_set(f.D)
    h = cs.h
    delta = delta_f(reduce_form(f))
    if args.interval is not None:
        if args.interval > args.x:
            raise ValueError("interval length y exceeds x")
        count = pi_f_interval(f, args.x, args.interval)
        main = delta * (_Li(args.x) - _Li(args.x - args.interval)) / h
        label = "pi_f(%g) - pi_f(%g)" % (args.x, args.x - args.interval)
    else:
        count = pi_f(f, args.x)
        main = delta * _Li(args.x) / h
        label = "pi_f(%g)" % args.x
    if args.format == "json":
        print(json.dumps({"schema": "bqf-sieve/1", "form": f.triple(), "x": args.x,
                          "y": args.interval, "count": count,
                          "chebotarev_main": main}))
    else:
        print("%s = %d  (Chebotarev main term %s)" % (label, count, _fmt(main)))
    return EXIT_OK


def cmd_sieve(args) -> int:
    f = _parse_form(args)
    y = args.y if args.y is not None else args.x
    params = SieveParams.of(f, args.x, y, phi_mode=args.phi, epsilon=args.epsilon)
    rep = selberg_upper_bound(params)
    tag = " [conditional: GRH for chi_{-D}]" if args.phi == 0 else ""
    payload = {
        "schema": "bqf-sieve/1", "form": f.triple(), "x": args.x, "y": y,
        "z": params.z, "J": rep.J, "script_J": rep.script_J,
        "main_term": rep.main_term, "remainder_majorized": rep.remainder_majorized,
        "remainder_signed": rep.remainder_signed, "upper_bound": rep.upper_bound,
        "sifted_count": rep.sifted_count,
        "exact_interval_count": rep.exact_interval_count,
        "theta": rep.theta, "theta_prime": rep.theta_prime,
        "rhs_theorem": rep.rhs_theorem,
        "degenerate_L_branch": rep.degenerate_L_branch,
        "conditional": args.phi == 0,
    }
    if args.format == "json":
        print(json.dumps(payload))
    else:
        print("z = %s  J = %s  scriptJ = %s%s"
              % (_fmt(params.z), _fmt(rep.J), _fmt(rep.script_J), tag))
        print("main = %s  remainder = %s  upper_bound = %s"
              % (_fmt(rep.main_term), _fmt(rep.remainder_majorized),
                 _fmt(rep.upper_bound)))
        print("sifted = %d  primes in interval = %d  rhs = %s"
              % (rep.sifted_count, rep.exact_interval_count, _fmt(rep.rhs_theorem)))
        ok = rep.upper_bound >= rep.sifted_count
        print("sieve bound valid: %s" % _fmt(ok))
    if rep.degenerate_L_branch:
        print("anomaly: L(1,chi) < (log y)^-2, scriptJ took the (log y)^2 branch",
              file=sys.stderr)
    return EXIT_OK


def _record_row(r: SweepRecord) -> list[str]:
    return [_fmt(r.D), _fmt(r.a), _fmt(r.b), _fmt(r.c), _fmt(r.h),
            _fmt(r.delta_f), _fmt(r.x), _fmt(r.y),
            _fmt(r.z) if r.z == r.z else "",
            _fmt(r.exact_count), _fmt(r.upper_bound), _fmt(r.rhs_theorem),
            _fmt(r.theta_or_theta_prime), r.pass_, _fmt(r.runtime_ms)]


def cmd_verify(args) -> int:
    x_rule = args.x_rule
    if x_rule is None and args.x_exp is not None:
        x_rule = f"(D**(1+4*phi)/a)**{args.x_exp}"
    y_rule = args.y_rule
    if y_rule is None and args.y_exp is not None:
        # --y-exp e means y = x^e with x taken from the (uncapped) x rule
        base_x = x_rule or "(D**(1+4*phi)/a)**(1+epsilon)"
        y_rule = f"({base_x})**({args.y_exp})"
    cfg = SweepConfig(Q=args.Q, mode=args.mode, phi_mode=args.phi,
                      epsilon=args.epsilon, x_rule=x_rule, y_rule=y_rule,
                      x_max=args.xmax, k=args.k, slack=args.slack,
                      seed=args.seed, sample=args.sample, jobs=args.jobs,
                      time_budget=args.time_budget)
    result = run_sweep(cfg)
    s = result.summary
    rows = [_record_row(r) for r in result.records]
    if args.format == "json":
        doc = {"schema": "bqf-sieve/1",
               "config": {"Q": cfg.Q, "mode": cfg.mode, "phi": cfg.phi_mode,
                          "epsilon": cfg.epsilon, "x_rule": cfg.x_rule,
                          "y_rule": cfg.y_rule, "x_max": cfg.x_max, "k": cfg.k,
                          "slack": cfg.slack, "seed": cfg.seed},
               "columns": CSV_COLUMNS,
               "rows": rows,
               "summary": {"total": s.total, "passes": s.passes,
                           "failures": s.failures,
                           "not_applicable": s.not_applicable,
                           "skipped": s.skipped, "max_ratio": s.max_ratio,
                           "partial": s.partial}}
        text = json.dumps(doc, indent=1)
        _emit(text, args.out)
    else:
        import io

        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        writer.writerows(rows)
        _emit(buf.getvalue(), args.out, newline_end=False)
    print("total=%d passes=%d failures=%d na=%d skipped=%d max_ratio=%s%s"
          % (s.total, s.passes, s.failures, s.not_applicable, s.skipped,
             _fmt(s.max_ratio), " [partial: time budget hit]" if s.partial else ""),
          file=sys.stderr)
    return EXIT_VERIFY_FAILED if s.failures else EXIT_OK


def cmd_family(args) -> int:
    rep = average_exceptional_report(args.Q, args.epsilon, x_cap=args.xmax,
                                     jobs=args.jobs)
    payload = {"schema": "bqf-sieve/1", "Q": rep.Q, "epsilon": rep.epsilon,
               "total": rep.total, "violators_E": rep.violators_E,
               "violators_L": rep.violators_L, "fraction_E": rep.fraction_E,
               "fraction_L": rep.fraction_L}
    if args.format == "json":
        print(json.dumps(payload))
    else:
        print("family D <= %d: %d members" % (rep.Q, rep.total))
        print("E-envelope violators: %d (fraction %s)"
              % (rep.violators_E, _fmt(rep.fraction_E)))
        print("-L'/L violators: %d (fraction %s)"
              % (rep.violators_L, _fmt(rep.fraction_L)))
    return EXIT_OK


def _emit(text: str, out: str | None, newline_end: bool = True) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text if not newline_end else text + "\n")
    else:
        sys.stdout.write(text if not newline_end else text + "\n")


def _add_form_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("c", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bqf", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="reduce a form; print D, delta, primitivity")
    _add_form_args(p)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("classgroup", help="list the reduced primitive forms of -D")
    p.add_argument("D", type=int)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_classgroup)

    p = sub.add_parser("count", help="congruence counts and local density at x")
    _add_form_args(p)
    p.add_argument("x", type=float)
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("pif", help="primes up to x represented by the form")
    _add_form_args(p)
    p.add_argument("x", type=float)
    p.add_argument("--interval", type=float, default=None, metavar="Y")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_pif)

    p = sub.add_parser("sieve", help="run the Selberg upper-bound sieve once")
    _add_form_args(p)
    p.add_argument("x", type=float)
    p.add_argument("--y", type=float, default=None)
    p.add_argument("--phi", type=float, choices=(0.0, 0.25), default=0.25)
    p.add_argument("--epsilon", type=float, default=0.2)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_sieve)

    p = sub.add_parser("verify", help="theorem-verification sweep over D <= Q")
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--mode", choices=("full", "interval", "almost"), default="full")
    p.add_argument("--phi", type=float, choices=(0.0, 0.25), default=0.25)
    p.add_argument("--epsilon", type=float, default=0.2)
    p.add_argument("--x-exp", type=float, default=None, dest="x_exp")
    p.add_argument("--y-exp", type=float, default=None, dest="y_exp")
    p.add_argument("--x-rule", default=None, dest="x_rule",
                   help="expression over (D, a), e.g. '(D*D/a)**1.2'")
    p.add_argument("--y-rule", default=None, dest="y_rule")
    p.add_argument("--xmax", type=float, default=1e7)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--slack", type=float, default=1.0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample", type=int, default=None)
    p.add_argument("--time-budget", type=float, default=None, dest="time_budget")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("family", help="average exceptional-set report over D <= Q")
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--xmax", type=float, default=1e7)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_family)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if "jobs" in args and os.environ.get("BQF_THREADS"):
        args.jobs = int(os.environ["BQF_THREADS"])
    try:
        return args.func(args)
    except (ValueError, RuleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
