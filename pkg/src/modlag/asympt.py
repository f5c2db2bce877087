"""Asymptotic predictions for the recurrence coefficients and zero geometry.

In the double scaling N = n + sqrt(2) L n^{1/2} the coefficients obey

    n a_n   -> nu - K(L)            (error O(n^{-1/2}) empirically),
    sqrt(n) (b_n - 1) -> b1,

where K is the auxiliary Painleve IV function of the (nu, b) family
evaluated at the time L, and b1 depends on the branch:

    generic            b1 = sqrt(2) [ K (K + 2b) / (u (K - nu)) - L ]
    u(L) ~ 0, u' = -4b b1 = sqrt(2) [ K'/(2 nu) - L ]
    u(L) ~ 0, u' = +4b b1 = sqrt(2) [ K'/(2 (nu + 2b)) - L ]

and the Schlesinger rewrite b1 = -sqrt(2) (u*(L)/2 + L) must agree with
the generic branch.  The module also estimates empirical convergence
orders and reports zero-to-Szego-curve distances.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath as mp

from .errors import AtPoleOfU, DegenerateFit, DegenerateKNu
from .numerics import PrecisionContext
from .ortho import laguerre_exact, poly_coeffs, recurrence_from_moments, zeros
from .piv import piv_point, schlesinger_shift
from .weight_moments import ModelParams, moments, szego_distance

__all__ = [
    "Prediction",
    "CompareReport",
    "predict",
    "pipeline_coefficients",
    "compare",
    "order_estimate",
    "zero_distance_report",
]


@dataclass
class Prediction:
    nu: float
    b: float
    L: float
    a1: object
    b1: object
    branch: str
    u: object
    K: object
    dK: object
    b1_schlesinger: object = None


@dataclass
class CompareReport:
    params: dict
    ns: list
    an: list = field(default_factory=list)
    bn: list = field(default_factory=list)
    e_a: list = field(default_factory=list)
    e_b: list = field(default_factory=list)
    slope_a: object = None
    slope_b: object = None


def predict(nu, b, L, ctx: PrecisionContext) -> Prediction:
    """First-order coefficients a1 = nu - K(L) and branch-resolved b1."""
    with ctx.workprec():
        nu = mp.mpf(nu)
        b = mp.mpf(b)
        L = mp.mpf(L)
        pt = piv_point(nu, b, L, ctx)
        u, du, K, dK = pt.u, pt.du, pt.K, pt.dK
        a1 = nu - K
        window = mp.mpf(2) ** (-(ctx.bits // 4))
        rt2 = mp.sqrt(2)
        b1_s = None
        if abs(u) <= window:
            # L'Hospital branches: at a zero of u the slope is exactly -+4b
            if abs(du + 4 * b) <= abs(du - 4 * b):
                branch = "lhospital_minus"
                b1 = rt2 * (dK / (2 * nu) - L)
            else:
                branch = "lhospital_plus"
                b1 = rt2 * (dK / (2 * (nu + 2 * b)) - L)
        elif abs(K - nu) <= window * max(1, abs(nu)):
            branch = "degenerate_K_eq_nu"
            b1 = None
        else:
            branch = "generic"
            b1 = rt2 * (K * (K + 2 * b) / (u * (K - nu)) - L)
            u_star, _src = schlesinger_shift(nu, b, L, ctx)
            b1_s = -rt2 * (u_star / 2 + L)
        return Prediction(nu=float(nu), b=float(b), L=float(L), a1=a1, b1=b1,
                          branch=branch, u=u, K=K, dK=dK, b1_schlesinger=b1_s)


def _auto_bits(n, requested):
    """Working precision for the moments -> recurrence pipeline at degree n."""
    return max(requested, 4 * n + 256)


def pipeline_coefficients(nu, b, L, n, ctx: PrecisionContext, cache_dir=None):
    """(a_n, b_n) through the full moments -> Chebyshev pipeline."""
    work = ctx.with_bits(_auto_bits(n, ctx.bits))
    p = ModelParams(nu=nu, b=b, L=L, n=n)
    with work.workprec():
        tbl = moments(p, 2 * n + 1, work, cache_dir=cache_dir)
        rt = recurrence_from_moments(tbl, n, work)
        return mp.mpc(rt.a[n - 1]), mp.mpc(rt.b[n])


def compare(nu, b, L, ns, ctx: PrecisionContext, exact_b0=False, cache_dir=None) -> CompareReport:
    """Error table e_a(n) = |n a_n - a1|, e_b(n) = |sqrt(n)(b_n - 1) - b1|.

    exact_b0 short-circuits the pipeline through the closed Laguerre
    coefficients (b = 0 only).
    """
    pred = predict(nu, b, L, ctx)
    if pred.b1 is None:
        raise DegenerateKNu("K(L) = nu: b_n does not tend to 1 but to another constant")
    rep = CompareReport(params={"nu": nu, "b": b, "L": L}, ns=list(ns))
    for n in ns:
        if exact_b0:
            p = ModelParams(nu=nu, b=b, L=L, n=n)
            with ctx.workprec():
                an, bn = laguerre_exact(p, n)
        else:
            an, bn = pipeline_coefficients(nu, b, L, n, ctx, cache_dir=cache_dir)
        with ctx.workprec():
            rep.an.append(an)
            rep.bn.append(bn)
            rep.e_a.append(abs(n * an - pred.a1))
            rep.e_b.append(abs(mp.sqrt(n) * (bn - 1) - pred.b1))
    if len(ns) >= 3:
        rep.slope_a = order_estimate(ns, rep.e_a)
        rep.slope_b = order_estimate(ns, rep.e_b)
    return rep


def order_estimate(ns, errors):
    """Least-squares slope of log error against log n."""
    if len(ns) < 3 or len(ns) != len(errors):
        raise DegenerateFit("need at least 3 matched points")
    if any(e <= 0 for e in errors):
        raise DegenerateFit("errors must be positive for a log-log fit")
    xs = [mp.log(n) for n in ns]
    ys = [mp.log(e) for e in errors]
    m = len(xs)
    xbar = sum(xs) / m
    ybar = sum(ys) / m
    sxx = sum((x - xbar) ** 2 for x in xs)
    if sxx == 0:
        raise DegenerateFit("degenerate abscissae")
    return sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys)) / sxx


def zero_distance_report(nu, b, L, n, ctx: PrecisionContext, cache_dir=None):
    """Zeros of pi_n and their distances to the Szego curve."""
    work = ctx.with_bits(_auto_bits(n, ctx.bits))
    p = ModelParams(nu=nu, b=b, L=L, n=n)
    with work.workprec():
        tbl = moments(p, 2 * n + 1, work, cache_dir=cache_dir)
        rt = recurrence_from_moments(tbl, n, work)
        coeffs = poly_coeffs(rt, n)
        zs = zeros(coeffs, work)
    with ctx.workprec():
        dists = [szego_distance(z, ctx) for z in zs.zeros]
        return {
            "n": n,
            "zeros": zs.zeros,
            "distances": dists,
            "max_dist": max(dists),
            "mean_dist": sum(dists) / len(dists),
            "max_residual": zs.max_residual,
        }
