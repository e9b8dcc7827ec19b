"""Command-line interface: ``psode find | verify | darboux``."""

from __future__ import annotations

import argparse
import json
import sys

from . import exprtree as ex
from .algsys import SolverBudgetExceeded
from .darboux import find_eigenpolynomials
from .firstintegral import verify_expression
from .odemodel import NonRationalRhs, parse_pin, parse_soode
from .parsing import ParseError
from .pipeline import Config, emit, run
from .polyring import format_poly

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NONE = 2


def _load(args):
    params = tuple(args.param or ())
    s = parse_soode(args.ode, params)
    pins = {}
    for text in args.pin or ():
        name, value = parse_pin(text, params)
        pins[name] = value
    if pins:
        s = s.substitute(pins)
    return s, params, pins


def _common(p):
    p.add_argument("ode", help="equation, e.g. \"y'' = -y'^2/(3*x*y' - y - 1)\"")
    p.add_argument("--param", action="append", metavar="NAME", help="declare a symbolic parameter")
    p.add_argument("--pin", action="append", metavar="NAME=EXPR", help="fix a parameter")
    p.add_argument("--parametric", action="store_true",
                   help="solve for parameter values that admit Darboux polynomials")


def build_parser():
    ap = argparse.ArgumentParser(prog="psode", description="First integrals of rational second-order ODEs.")
    sub = ap.add_subparsers(dest="cmd", required=True)
    f = sub.add_parser("find", help="search for first integrals")
    _common(f)
    f.add_argument("--max-deg", type=int, default=2)
    f.add_argument("--degq-factor", type=int, default=10)
    f.add_argument("--budget", type=float, default=None, metavar="SECONDS",
                   help="total wall-clock budget")
    f.add_argument("--solve-budget", type=float, default=10.0, metavar="SECONDS",
                   help="budget for each algebraic solve; a group that exceeds it is not retried at larger Deg_Q")
    f.add_argument("--json", action="store_true")
    v = sub.add_parser("verify", help="check that an expression is a first integral")
    _common(v)
    v.add_argument("--invariant", required=True)
    d = sub.add_parser("darboux", help="Darboux polynomials up to a degree")
    _common(d)
    d.add_argument("--deg", type=int, default=1)
    d.add_argument("--json", action="store_true")
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        s, params, pins = _load(args)
        if args.cmd == "find":
            cfg = Config(max_deg=args.max_deg, degq_factor=args.degq_factor,
                         time_budget_s=args.solve_budget, total_budget_s=args.budget,
                         parametric=args.parametric, pins=pins,
                         output="json" if args.json else "text")
            report = run(s, cfg, declared_params=params)
            print(emit(report, cfg.output))
            return EXIT_OK if any(fi.verified for fi in report.first_integrals) else EXIT_NONE
        if args.cmd == "verify":
            e = ex.parse_invariant(args.invariant, s.params)
            ok = verify_expression(s, e)
            print(json.dumps({"invariant": ex.to_text(e), "verified": ok}))
            return EXIT_OK if ok else EXIT_NONE
        if args.cmd == "darboux":
            if args.deg < 1:
                raise ValueError("--deg must be at least 1")
            pairs = find_eigenpolynomials(s, args.deg, parametric=args.parametric)
            rows = [{"v": format_poly(p.v), "g": format_poly(p.g), "constraints": list(p.constraints)}
                    for p in pairs]
            if args.json:
                print(json.dumps({"ode": s.text(), "darboux": rows}, indent=2))
            else:
                for r in rows:
                    c = f"  [{'; '.join(r['constraints'])}]" if r["constraints"] else ""
                    print(f"v = {r['v']}   g = {r['g']}{c}")
            return EXIT_OK if rows else EXIT_NONE
    except (ParseError, NonRationalRhs, ValueError, ex.IncomparableBasis) as err:
        print(f"psode: error: {err}", file=sys.stderr)
        return EXIT_ERROR
    except SolverBudgetExceeded as err:
        print(f"psode: budget exhausted: {err}", file=sys.stderr)
        return EXIT_NONE
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
