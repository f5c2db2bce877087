"""Command-line interface.

Subcommands map one-to-one onto the library operations:

    moments      contour moments of the weight
    recurrence   recurrence coefficients a_k, b_k
    predict      first-order coefficients from the Painleve IV data
    compare      error table and empirical convergence orders
    zeros        polynomial zeros with Szego-curve distances
    szego        polyline sample of the Szego curve
    level-curve  traced Gamma_{0,n} polyline
    piv-eval     closed-form Painleve IV data at a point
    pcf-eval     parabolic cylinder function value/derivative
    selfcheck    quick invariant suite, nonzero exit on failure

Output is JSON (default) or CSV with a ``--digits`` control; numeric
failures exit with code 3, argument errors with code 2.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

import mpmath as mp

from . import asympt, ortho, piv, weight_moments
from .errors import ModlagError
from .numerics import PrecisionContext
from .pcf import pcf_d, pcf_d_prime

SCHEMA = "1"


def _fmt(x, digits):
    if x is None:
        return None
    # convert above the requested print precision so no digits are rounded away
    with mp.workprec(max(mp.mp.prec, int(3.33 * digits) + 16)):
        x = mp.mpc(x)
        if mp.im(x) == 0:
            return mp.nstr(mp.re(x), digits)
        return {"re": mp.nstr(mp.re(x), digits), "im": mp.nstr(mp.im(x), digits)}


def _emit(doc, args):
    doc = {"schema": SCHEMA, **doc}
    if args.format == "json":
        print(json.dumps(doc, indent=2))
    else:
        rows = doc.get("rows", [])
        if rows:
            cols = list(rows[0].keys())
            print(",".join(cols))
            for r in rows:
                print(",".join(str(r[c]) for c in cols))
        else:
            for k, v in doc.items():
                print(f"{k},{v}")


def _ctx(args):
    if args.prec_bits == "auto":
        return PrecisionContext()
    return PrecisionContext(bits=int(args.prec_bits))


def _params(args):
    return weight_moments.ModelParams(nu=args.nu, b=args.b, L=args.L, n=args.n)


def _contour(args, p, ctx):
    base = weight_moments.default_contour(p, ctx)
    rho = args.rho if args.rho is not None else base.rho
    eps = args.eps if args.eps is not None else base.eps
    R = args.R if args.R is not None else base.R
    return weight_moments.ContourSpec(rho=rho, eps=eps, R=R)


def cmd_moments(args):
    ctx = _ctx(args)
    p = _params(args)
    contour = _contour(args, p, ctx) if args.method == "quadrature" else None
    method = args.method if args.method != "auto" else (
        "closed_form" if float(2 * args.b).is_integer() else "quadrature")
    tbl = weight_moments.moments(p, args.m, ctx, method=method,
                                 contour=contour, cache_dir=args.cache_dir)
    return {
        "command": "moments", "method": method, "bits": ctx.bits,
        "rows": [{"j": j, "re": mp.nstr(mp.re(v), args.digits),
                  "im": mp.nstr(mp.im(v), args.digits)}
                 for j, v in enumerate(tbl.values)],
    }


def cmd_recurrence(args):
    ctx = _ctx(args)
    an, bn = asympt.pipeline_coefficients(args.nu, args.b, args.L, args.n, ctx,
                                          cache_dir=args.cache_dir)
    return {"command": "recurrence", "n": args.n,
            "a_n": _fmt(an, args.digits), "b_n": _fmt(bn, args.digits)}


def cmd_predict(args):
    ctx = _ctx(args)
    pr = asympt.predict(args.nu, args.b, args.L, ctx)
    doc = {"command": "predict", "branch": pr.branch,
           "a1": _fmt(pr.a1, args.digits), "b1": _fmt(pr.b1, args.digits),
           "u": _fmt(pr.u, args.digits), "K": _fmt(pr.K, args.digits),
           "Kprime": _fmt(pr.dK, args.digits),
           "b1_schlesinger": _fmt(pr.b1_schlesinger, args.digits)}
    if pr.branch == "degenerate_K_eq_nu":
        doc["note"] = "K(L) = nu: b_n does not tend to 1 but to another constant"
    return doc


def cmd_compare(args):
    ctx = _ctx(args)
    ns = [int(x) for x in args.n_list.split(",")]
    rep = asympt.compare(args.nu, args.b, args.L, ns, ctx, cache_dir=args.cache_dir)
    return {
        "command": "compare",
        "rows": [{"n": n,
                  "a_n": mp.nstr(mp.re(a), args.digits),
                  "b_n": mp.nstr(mp.re(b), args.digits),
                  "e_a": mp.nstr(e1, args.digits),
                  "e_b": mp.nstr(e2, args.digits)}
                 for n, a, b, e1, e2 in zip(rep.ns, rep.an, rep.bn, rep.e_a, rep.e_b)],
        "slope_a": mp.nstr(rep.slope_a, args.digits),
        "slope_b": mp.nstr(rep.slope_b, args.digits),
    }


def cmd_zeros(args):
    ctx = _ctx(args)
    rep = asympt.zero_distance_report(args.nu, args.b, args.L, args.n, ctx,
                                      cache_dir=args.cache_dir)
    return {
        "command": "zeros", "n": args.n,
        "max_dist": mp.nstr(rep["max_dist"], args.digits),
        "mean_dist": mp.nstr(rep["mean_dist"], args.digits),
        "rows": [{"re": mp.nstr(mp.re(z), args.digits),
                  "im": mp.nstr(mp.im(z), args.digits),
                  "szego_distance": mp.nstr(d, args.digits)}
                 for z, d in zip(rep["zeros"], rep["distances"])],
    }


def cmd_szego(args):
    ctx = _ctx(args)
    pts = weight_moments.szego_curve_points(args.samples, ctx)
    return {"command": "szego",
            "rows": [{"re": mp.nstr(mp.re(z), args.digits),
                      "im": mp.nstr(mp.im(z), args.digits)} for z in pts]}


def cmd_level_curve(args):
    ctx = _ctx(args)
    p = _params(args)
    poly = weight_moments.gamma0_trace(p, args.step, ctx)
    return {"command": "level-curve", "n": args.n,
            "rows": [{"re": mp.nstr(mp.re(z), args.digits),
                      "im": mp.nstr(mp.im(z), args.digits)} for z in poly]}


def cmd_piv_eval(args):
    ctx = _ctx(args)
    pt = piv.piv_point(args.nu, args.b, args.s, ctx)
    return {"command": "piv-eval", "s": args.s,
            "u": _fmt(pt.u, args.digits), "du": _fmt(pt.du, args.digits),
            "y": _fmt(pt.y, args.digits), "K": _fmt(pt.K, args.digits),
            "Kprime": _fmt(pt.dK, args.digits), "H": _fmt(pt.H, args.digits)}


def cmd_pcf_eval(args):
    ctx = _ctx(args)
    z = mp.mpc(args.z_re, args.z_im)
    return {"command": "pcf-eval",
            "D": _fmt(pcf_d(args.order, z, ctx), args.digits),
            "Dprime": _fmt(pcf_d_prime(args.order, z, ctx), args.digits)}


def cmd_selfcheck(args):
    ctx = _ctx(args)
    rng = random.Random(args.seed)
    failures = []

    def check(name, ok):
        if not ok:
            failures.append(name)

    # Stokes cyclic relation on a few random parameter pairs
    for _ in range(5):
        nu = rng.uniform(-2, 2)
        if abs(nu - round(nu)) < 0.05:
            nu += 0.11
        b = rng.choice([0, 0.5, 1])
        for norm in ("canonical", "case1-sm", "case2-sm"):
            r = piv.stokes_cyclic_residual(nu, b, norm, ctx)
            check(f"stokes {norm} nu={nu:.3f} b={b}", r < mp.mpf(10) ** -30)
    # closed-form vs quadrature moments at a small degree
    p = weight_moments.ModelParams(nu=0.7, b=0.5, L=0.1, n=4)
    t1 = weight_moments.moments(p, 4, ctx, method="closed_form")
    t2 = weight_moments.moments(p, 4, ctx, method="quadrature")
    agree = max(abs(a - b) / abs(a) for a, b in zip(t1.values, t2.values))
    check("moments agreement", agree < mp.mpf(10) ** (-(ctx.bits // 2) * 0.3))
    # b=0 pipeline against the exact Laguerre coefficients
    an, bn = asympt.pipeline_coefficients(0.5, 0, 0.2, 8, ctx)
    p0 = weight_moments.ModelParams(nu=0.5, b=0, L=0.2, n=8)
    with PrecisionContext(bits=max(ctx.bits, 288)).workprec():
        ae, be = ortho.laguerre_exact(p0, 8)
        ok = abs(an - ae) / abs(ae) < mp.mpf(10) ** -20 and abs(bn - be) / abs(be) < mp.mpf(10) ** -20
    check("laguerre pipeline", ok)
    return {"command": "selfcheck", "checks_failed": failures, "ok": not failures}


def build_parser():
    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--format", choices=["json", "csv"], default="json")
    out.add_argument("--digits", type=int, default=20)
    out.add_argument("--prec-bits", dest="prec_bits", default="auto")
    out.add_argument("--cache-dir", dest="cache_dir",
                     default=os.environ.get("MODLAG_CACHE_DIR"))
    out.add_argument("--seed", type=int, default=0)

    ap = argparse.ArgumentParser(prog="modlag",
                                 description="Recurrence coefficients and Painleve IV "
                                             "asymptotics for a modified Laguerre weight")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=lambda **kw:
                            argparse.ArgumentParser(parents=[out], **kw))

    def common(sp, n=True):
        sp.add_argument("--nu", type=float, required=True)
        sp.add_argument("--b", type=float, default=0.0)
        sp.add_argument("--L", type=float, default=0.0)
        if n:
            sp.add_argument("--n", type=int, required=True)

    sp = sub.add_parser("moments")
    common(sp)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--method", choices=["auto", "quadrature", "closed_form"], default="auto")
    sp.add_argument("--rho", type=float)
    sp.add_argument("--eps", type=float)
    sp.add_argument("--R", type=float)
    sp.set_defaults(func=cmd_moments)

    sp = sub.add_parser("recurrence")
    common(sp)
    sp.set_defaults(func=cmd_recurrence)

    sp = sub.add_parser("predict")
    common(sp, n=False)
    sp.set_defaults(func=cmd_predict)

    sp = sub.add_parser("compare")
    common(sp, n=False)
    sp.add_argument("--n-list", dest="n_list", default="64,128,256,512")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("zeros")
    common(sp)
    sp.set_defaults(func=cmd_zeros)

    sp = sub.add_parser("szego")
    sp.add_argument("--samples", type=int, default=512)
    sp.set_defaults(func=cmd_szego)

    sp = sub.add_parser("level-curve")
    common(sp)
    sp.add_argument("--step", type=float, default=0.05)
    sp.set_defaults(func=cmd_level_curve)

    sp = sub.add_parser("piv-eval")
    common(sp, n=False)
    sp.add_argument("--s", type=float, required=True)
    sp.set_defaults(func=cmd_piv_eval)

    sp = sub.add_parser("pcf-eval")
    sp.add_argument("--order", type=float, required=True)
    sp.add_argument("--z-re", type=float, required=True)
    sp.add_argument("--z-im", type=float, default=0.0)
    sp.set_defaults(func=cmd_pcf_eval)

    sp = sub.add_parser("selfcheck")
    sp.set_defaults(func=cmd_selfcheck)

    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        doc = args.func(args)
    except ModlagError as exc:
        _emit({"error": {"type": type(exc).__name__, "message": str(exc)}}, args)
        return 3
    _emit(doc, args)
    if args.command == "selfcheck" and not doc.get("ok"):
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
