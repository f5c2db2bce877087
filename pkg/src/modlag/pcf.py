"""Parabolic cylinder functions D_nu(z) for real order and complex argument.

Evaluation follows the standard convention: D_nu solves the Weber
equation y'' + (nu + 1/2 - z^2/4) y = 0 and behaves like
z^nu e^{-z^2/4} as z -> infinity in |arg z| < 3pi/4.

Moderate arguments use the convergent confluent-hypergeometric series;
large arguments use the asymptotic expansion, rotated into the valid
sector with the D_{-nu-1}(+-iz) connection formulas where necessary.
"""

from __future__ import annotations

import mpmath as mp

from .errors import PoleOfGamma
from .numerics import PrecisionContext, gamma

__all__ = ["PcfEval", "pcf_d", "pcf_d_prime", "pcf_wronskian", "pcf_real_zeros"]


class PcfEval:
    """Value/derivative pair of D_nu at one point."""

    __slots__ = ("nu", "z", "value", "dvalue")

    def __init__(self, nu, z, value, dvalue):
        self.nu = nu
        self.z = z
        self.value = value
        self.dvalue = dvalue


def _rgamma(z, ctx):
    """1/Gamma, zero at the poles."""
    try:
        return 1 / gamma(z, ctx)
    except PoleOfGamma:
        return mp.mpf(0)


def _kummer_m(a, b, x, prec_bits):
    """Confluent hypergeometric M(a, b, x) by direct series."""
    term = mp.mpf(1)
    total = mp.mpf(1)
    eps = mp.mpf(2) ** (-(prec_bits + 16))
    k = 0
    while True:
        term = term * (a + k) / (b + k) * x / (k + 1)
        total += term
        k += 1
        if abs(term) < eps * max(1, abs(total)) and k > abs(x):
            break
        if k > 100000:
            break
    return total


def _series_d(nu, z, ctx):
    # D_nu = 2^{nu/2} sqrt(pi) e^{-z^2/4}
    #          [ M(-nu/2,1/2,z^2/2)/Gamma((1-nu)/2)
    #            - sqrt(2) z M((1-nu)/2,3/2,z^2/2)/Gamma(-nu/2) ]
    # guard against the e^{-z^2/4} cancellation against the e^{|x|} series scale
    extra = int(2.9 * abs(z) ** 2 / 2) + 48
    with mp.workprec(ctx.bits + ctx.guard_bits + extra):
        gctx = ctx.with_bits(ctx.bits + extra + ctx.guard_bits)
        # x must carry the full guarded precision: the cancelling bracket
        # amplifies any rounding of x by roughly e^{|x|} / |bracket|
        x = z * z / 2
        m1 = _kummer_m(-nu / 2, mp.mpf(1) / 2, x, ctx.bits + extra)
        m2 = _kummer_m((1 - nu) / 2, mp.mpf(3) / 2, x, ctx.bits + extra)
        val = mp.power(2, nu / 2) * mp.sqrt(mp.pi) * mp.exp(-x / 2) * (
            m1 * _rgamma((1 - nu) / 2, gctx)
            - mp.sqrt(2) * z * m2 * _rgamma(-nu / 2, gctx))
    return val


def _asymptotic_d(nu, z, ctx):
    # z^nu e^{-z^2/4} sum_m (-1)^m (nu)(nu-1)...(nu-2m+1) / (m! 2^m z^{2m}),
    # truncated at the smallest term.
    with mp.workprec(ctx.bits + ctx.guard_bits):
        total = mp.mpf(1)
        term = mp.mpf(1)
        z2 = z * z
        eps = mp.mpf(2) ** (-(ctx.bits + 8))
        best = abs(term)
        m = 0
        while True:
            term = term * (-(nu - 2 * m) * (nu - 2 * m - 1)) / (2 * (m + 1) * z2)
            m += 1
            if abs(term) > best:
                break  # divergence onset; stop at the optimal truncation
            best = abs(term)
            total += term
            if abs(term) < eps:
                break
            if m > 4 * ctx.bits:
                break
        val = mp.power(z, nu) * mp.exp(-z2 / 4) * total
    return val


def _switch_radius(nu, ctx):
    r = max(8.0, 2 * mp.sqrt(abs(nu) + 1))
    # the asymptotic optimal-truncation error is ~ e^{-|z|^2/2}; push the
    # switch out with precision so the expansion can actually meet tolerance
    r_prec = mp.sqrt(2 * (ctx.bits + 16) * mp.log(2))
    return max(r, r_prec)


def pcf_d(nu, z, ctx: PrecisionContext):
    """D_nu(z), entire in z, relative error <= ctx.target_rel_tol."""
    with ctx.workprec():
        nu = mp.mpf(nu)
        z = mp.mpc(z)
        if abs(z) < _switch_radius(nu, ctx):
            return _series_d(nu, z, ctx)
        arg = mp.arg(z)
        sector = mp.mpf(3) * mp.pi / 4 - mp.mpf("0.2")
        if abs(arg) <= sector:
            return _asymptotic_d(nu, z, ctx)
        # rotate with the connection formulas; both right-hand arguments
        # land inside the asymptotic sector
        c = mp.mpc(0, 1) * mp.sqrt(2 * mp.pi) * _rgamma(-nu, ctx)
        if arg > 0:
            # arg(-iz) = arg - pi/2 stays inside the sector for all arg > sector
            return (mp.expjpi(nu) * _asymptotic_d(nu, -z, ctx)
                    + c * mp.expjpi(nu / 2) * _asymptotic_d(-nu - 1, -mp.mpc(0, 1) * z, ctx))
        return (mp.expjpi(-nu) * _asymptotic_d(nu, -z, ctx)
                - c * mp.expjpi(-nu / 2) * _asymptotic_d(-nu - 1, mp.mpc(0, 1) * z, ctx))


def pcf_d_prime(nu, z, ctx: PrecisionContext):
    """D_nu'(z) via the ladder identity -(z/2) D_nu + nu D_{nu-1}."""
    with ctx.workprec():
        nu = mp.mpf(nu)
        z = mp.mpc(z)
        return -(z / 2) * pcf_d(nu, z, ctx) + nu * pcf_d(nu - 1, z, ctx)


def pcf_eval(nu, z, ctx: PrecisionContext) -> PcfEval:
    return PcfEval(nu, z, pcf_d(nu, z, ctx), pcf_d_prime(nu, z, ctx))


def pcf_wronskian(nu, s, ctx: PrecisionContext):
    """Wronskian with respect to s of (D_{nu-1}(sqrt2 s), D_nu(sqrt2 s)).

    Shift nu to obtain any W(D_mu(sqrt2 s), D_{mu+1}(sqrt2 s)).
    """
    with ctx.workprec():
        rt2 = mp.sqrt(2)
        z = rt2 * mp.mpc(s)
        f = pcf_d(nu - 1, z, ctx)
        g = pcf_d(nu, z, ctx)
        fp = pcf_d_prime(nu - 1, z, ctx)
        gp = pcf_d_prime(nu, z, ctx)
        return rt2 * (f * gp - fp * g)


def pcf_real_zeros(nu, interval, ctx: PrecisionContext, grid: int = 600):
    """Simple real zeros of s -> D_nu(sqrt2 s) on a finite interval.

    Bracketed on a uniform grid and refined by bisection to
    ctx.target_rel_tol.
    """
    lo, hi = mp.mpf(interval[0]), mp.mpf(interval[1])
    with ctx.workprec():
        rt2 = mp.sqrt(2)

        def f(s):
            return mp.re(pcf_d(nu, rt2 * s, ctx))

        xs = [lo + (hi - lo) * k / grid for k in range(grid + 1)]
        fs = [f(x) for x in xs]
        zeros = []
        for k in range(grid):
            a, b = xs[k], xs[k + 1]
            fa, fb = fs[k], fs[k + 1]
            if fa == 0:
                zeros.append(a)
                continue
            if fa * fb < 0:
                for _ in range(ctx.bits + 16):
                    mid = (a + b) / 2
                    fm = f(mid)
                    if fm == 0:
                        a = b = mid
                        break
                    if fa * fm < 0:
                        b, fb = mid, fm
                    else:
                        a, fa = mid, fm
                    if b - a < ctx.target_rel_tol * max(1, abs(a)):
                        break
                zeros.append((a + b) / 2)
        if fs[-1] == 0:
            zeros.append(xs[-1])
    return zeros
