"""``posop`` command-line front end.

Exit codes: 0 success, 2 usage/parse/domain errors, 3 numeric failures
(including a law residual above its tolerance).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Optional, Sequence

from . import charfun as cf
from .convergence import CATALOG, LAMBDAS, ExperimentSpec, run_experiment
from .errors import DomainError, NumericFailure, ParseError, PosopError
from .expression import parse_expression
from .laws import discrete_scaling_residual, integral_scaling_residual, kernel_homogeneity_residual, phi_residual
from .numerics import QuadratureSpec, TruncationPolicy
from .operators import OperatorSpec, apply
from .weights import WeightFamily

EVAL_FAMILIES = ("baskakov", "szasz", "bernstein", "mkz", "bbh", "q_a", "jl_exp", "lr", "discrete_d",
                 "mixed_bernstein", "gamma", "weierstrass", "lototsky", "bernstein_schnabl")

EVAL_EXAMPLES = {
    "baskakov": "--c 1 --n 5 --x 0.7",
    "szasz": "--n 5 --x 0.7",
    "bernstein": "--n 5 --x 0.7",
    "mkz": "--n 5 --x 0.7",
    "bbh": "--n 5 --x 0.7",
    "q_a": "--a 2 --n 5 --x 0.7",
    "jl_exp": "--p 1 --n 5 --x 0.7",
    "lr": "--n 5 --x 0.7",
    "discrete_d": "--c 1 --k 1 --rho 2 --n 5 --x 0.7",
    "mixed_bernstein": "--n 5 --x 0.7",
    "gamma": "--mu 3 --x 0.7",
    "weierstrass": "--a 1 --x 0.7",
    "lototsky": "--lambda 1-t --n 5 --x 0.7",
    "bernstein_schnabl": "--h 1 --n 5 --x 0.7",
}


def fmt(v: float) -> str:
    """17 significant digits; scientific below 1e-4 and from 1e17 up."""
    return format(float(v), "#.17g")


def _default_seed() -> int:
    raw = os.environ.get("POSOP_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise DomainError(f"POSOP_SEED must be an integer, got {raw!r}") from None


def _lambda(text: Optional[str]):
    if text is None:
        return None
    if text in LAMBDAS:
        return LAMBDAS[text]
    return parse_expression(text).to_function("unit")


def _policy(args) -> TruncationPolicy:
    return TruncationPolicy(rel_tail_tol=args.tail_tol)


def _quad(args) -> QuadratureSpec:
    return QuadratureSpec(rel_tol=args.quad_tol)


def _weight_family(name: str, args) -> WeightFamily:
    if name == "baskakov":
        return WeightFamily.baskakov(args.c)
    if name == "szasz":
        return WeightFamily.szasz()
    if name == "bernstein":
        return WeightFamily.bernstein()
    if name == "discrete_d":
        return WeightFamily.discrete_d(args.c, args.k, args.rho)
    if name == "q_a":
        return WeightFamily.q_a(args.a)
    if name == "jl_exp":
        return WeightFamily.jl_exp(args.p)
    return WeightFamily(name)


def _need(args, *names):
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise DomainError("missing required option(s): " + ", ".join("--" + n for n in missing))


def _operator(args) -> OperatorSpec:
    fam = args.family
    if fam == "gamma":
        return OperatorSpec.gamma(args.mu)
    if fam == "weierstrass":
        return OperatorSpec.weierstrass(args.a)
    _need(args, "n")
    if fam == "lototsky":
        if args.lam is None:
            raise DomainError("missing required option(s): --lambda")
        return OperatorSpec.lototsky(int(args.n), _lambda(args.lam))
    if fam == "bernstein_schnabl":
        return OperatorSpec.bernstein_schnabl(int(args.n), args.h)
    return OperatorSpec.discrete(_weight_family(fam, args), args.n)


def cmd_eval(args, out) -> int:
    _need(args, "x", "f")
    spec = _operator(args)
    domain = "real" if args.family == "weierstrass" else "halfline"
    f = parse_expression(args.f).to_function(domain)
    v = apply(spec, f, args.x, _policy(args), _quad(args), args.mc_samples, args.seed)
    print(fmt(v), file=out)
    return 0


def _charfun_spec(args) -> cf.CharfunSpec:
    tag = args.family
    if tag in ("gamma", "weierstrass"):
        return cf.CharfunSpec(tag, mu=args.mu, a=args.a)
    _need(args, "n")
    b = args.h / args.n if tag == "bernstein_schnabl" else 1.0
    return cf.CharfunSpec(tag, n=args.n, c=args.c, k=args.k, rho=args.rho, a=args.a, p=args.p,
                          b=b, lam=_lambda(args.lam))


def _grid(text: str) -> list[float]:
    try:
        lo, hi, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise DomainError(f"--s-grid must be MIN:MAX:STEP, got {text!r}") from None
    if not step > 0 or hi < lo:
        raise DomainError("--s-grid needs STEP > 0 and MAX >= MIN")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(count)]


def cmd_charfun(args, out) -> int:
    _need(args, "x", "s-grid")
    spec = _charfun_spec(args)
    grid = _grid(args.s_grid)
    policy = _policy(args)
    cols = ["s"]
    if args.mode in ("closed", "both"):
        cols += ["re_closed", "im_closed"]
    if args.mode in ("series", "both"):
        cols += ["re_series", "im_series"]
    if args.mode == "both":
        cols.append("abs_diff")
    rows = []
    for s in grid:
        row = [fmt(s)]
        if args.mode in ("closed", "both"):
            c = cf.charfun_closed(spec, s, args.x)
            row += [fmt(c.real), fmt(c.imag)]
        if args.mode in ("series", "both"):
            r = cf.charfun_series(spec, s, args.x, policy)
            row += [fmt(r.real), fmt(r.imag)]
        if args.mode == "both":
            row.append(fmt(abs(c - r)))
        rows.append(",".join(row))
    print(",".join(cols), file=out)
    for row in rows:
        print(row, file=out)
    return 0


def _experiment(args) -> ExperimentSpec:
    eid = args.experiment
    kw = dict(m=args.m, c=args.c, k=args.k, rho=args.rho, p=args.p, u=args.u, lam=_lambda(args.lam))
    if eid in ("E11", "E12"):
        kw["a_w"] = args.a
    else:
        kw["a"] = args.a
    return ExperimentSpec(eid, **kw)


def cmd_converge(args, out) -> int:
    _need(args, "x", "n-list")
    if (args.f is None) == (args.s is None):
        raise DomainError("give exactly one of --f or --s")
    exp = _experiment(args)
    try:
        ns = [int(v) for v in args.n_list.split(",")]
    except ValueError:
        raise DomainError(f"--n-list must be comma-separated integers, got {args.n_list!r}") from None
    probe = args.s if args.s is not None else parse_expression(args.f).to_function("real")
    rep = run_experiment(exp, ns, probe, args.x, _policy(args), _quad(args), args.seed, args.mc_samples)
    lines = ["n,re,im,abs_error"]
    for rec in rep.records:
        z = complex(rec.value)
        lines.append(f"{rec.n},{fmt(z.real)},{fmt(z.imag)},{fmt(rec.error)}")
    for line in lines:
        print(line, file=out)
    print(json.dumps({"experiment": rep.experiment, "fitted_order": rep.fitted_order,
                      "fit_r2": rep.fit_r2, "final_error": rep.final_error}), file=out)
    for note in rep.notes:
        print(f"note: {note}", file=sys.stderr)
    return 0


def cmd_laws(args, out) -> int:
    check = args.check
    if check == "scaling":
        _need(args, "family", "m", "nu", "x", "f")
        fam = _weight_family(args.family, args)
        res = discrete_scaling_residual(fam, args.m, _int(args.nu, "nu"), parse_expression(args.f).to_function(),
                                        args.x, _policy(args))
    elif check == "phi":
        _need(args, "family", "m", "k", "x")
        res = phi_residual(_weight_family(args.family, args), args.m, args.k, args.x)
    elif check == "integral-scaling":
        _need(args, "mu", "nu", "x", "f")
        res = integral_scaling_residual(OperatorSpec.gamma(args.mu), args.nu,
                                        parse_expression(args.f).to_function(), args.x, _quad(args))
    else:
        _need(args, "m", "nu", "t", "x")
        res = kernel_homogeneity_residual(args.m, args.nu, args.t, args.x)
    print(json.dumps({"residual": res.residual, "tolerance": res.tolerance_used}), file=out)
    return 0 if res.ok else 3


def _int(v: float, name: str) -> int:
    if int(v) != v:
        raise DomainError(f"--{name} must be an integer here")
    return int(v)


def cmd_catalog(args, out) -> int:
    print("experiments:", file=out)
    for eid, row in CATALOG.items():
        req = " ".join("--" + r for r in row.required)
        print(f"  {eid}: {row.title} -> {row.limit}", file=out)
        print(f"      requires: {req}", file=out)
        print(f"      example:  posop converge --experiment {eid} {row.example} --n-list 16,32,64,128", file=out)
    print("families (eval):", file=out)
    for fam in EVAL_FAMILIES:
        print(f"  {fam}: posop eval --family {fam} {EVAL_EXAMPLES[fam]} --f \"exp(-t)\"", file=out)
    print("lambda built-ins: " + ", ".join(LAMBDAS), file=out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="posop", description="Positive linear operators and their limit laws.")
    sub = p.add_subparsers(dest="command", required=True)

    def params(sp, *, family_choices=None):
        if family_choices is not None:
            sp.add_argument("--family", choices=family_choices)
        sp.add_argument("--n", type=float)
        sp.add_argument("--m", type=int, default=1)
        sp.add_argument("--c", type=float, default=0.0)
        sp.add_argument("--k", type=int, default=0)
        sp.add_argument("--rho", type=float, default=1.0)
        sp.add_argument("--a", type=float, default=1.0)
        sp.add_argument("--p", type=float, default=0.0)
        sp.add_argument("--mu", type=float, default=1.0)
        sp.add_argument("--h", type=float, default=1.0)
        sp.add_argument("--u", type=float, default=0.5)
        sp.add_argument("--lambda", dest="lam")
        sp.add_argument("--x", type=float)
        sp.add_argument("--tail-tol", type=float, default=1e-16)
        sp.add_argument("--quad-tol", type=float, default=1e-10)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--mc-samples", type=int, default=100_000)

    e = sub.add_parser("eval", help="apply an operator to an expression")
    params(e, family_choices=EVAL_FAMILIES)
    e.add_argument("--f")
    e.set_defaults(run=cmd_eval)

    c = sub.add_parser("charfun", help="characteristic function on a frequency grid")
    params(c, family_choices=cf.TAGS)
    c.add_argument("--s-grid")
    c.add_argument("--mode", choices=("closed", "series", "both"), default="both")
    c.set_defaults(run=cmd_charfun)

    v = sub.add_parser("converge", help="run a convergence experiment")
    params(v)
    v.add_argument("--experiment", required=True, choices=tuple(CATALOG))
    v.add_argument("--f")
    v.add_argument("--s", type=float)
    v.add_argument("--n-list")
    v.set_defaults(run=cmd_converge)

    law = sub.add_parser("laws", help="residual of a scaling identity")
    params(law, family_choices=("szasz", "jl_exp", "lr"))
    law.add_argument("--check", required=True, choices=("scaling", "phi", "integral-scaling", "kernel"))
    law.add_argument("--nu", type=float)
    law.add_argument("--t", type=float)
    law.add_argument("--f")
    law.set_defaults(run=cmd_laws)

    cat = sub.add_parser("catalog", help="list experiments and families")
    cat.set_defaults(run=cmd_catalog)
    return p


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if hasattr(args, "seed") and args.seed is None:
            args.seed = _default_seed()
        if getattr(args, "family", "") is None and args.command in ("eval", "charfun"):
            raise DomainError("--family is required")
        return args.run(args, out)
    except (ParseError, DomainError) as exc:
        print(f"posop: error: {exc}", file=sys.stderr)
        return 2
    except NumericFailure as exc:
        print(f"posop: numeric failure: {exc}", file=sys.stderr)
        return 3
    except PosopError as exc:
        print(f"posop: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
