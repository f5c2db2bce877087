"""Painleve IV quantities attached to the deformed Laguerre weight.

The parameters are (nu, b) with Theta = -b and Theta_inf = nu + b.  For
b in {0, 1/2, 1} the function u(s) and the related quantity y(s) have
closed forms built from parabolic cylinder functions; these are the
entry point for everything downstream (recurrence asymptotics, the
Schlesinger transformation, residue checks).

Conventions:

    u'' = (u')^2 / (2u) + (3/2) u^3 + 4 s u^2
          + 2 (s^2 + 1 - 2 Theta_inf) u - 8 Theta^2 / u,

    K  = (1/4) (-u' + u^2 + 2 s u + 4 Theta),
    K' = (1/4) (-u'' + 2 u u' + 2 u + 2 s u'),
    y'/y = -u - 2 s,
    H  = K (K - 2 Theta) / u - (u/2 + s)(K - Theta - Theta_inf).

At b = 0 the solution is u == 0 and H degenerates to its removable form
-(u/2 + s)(K - Theta - Theta_inf) evaluated along u -> 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp

from .errors import AtPoleOfU, ExcludedNu, UnsupportedB, UnsupportedClosedForm
from .numerics import PrecisionContext, gamma
from .pcf import pcf_d, pcf_d_prime

__all__ = [
    "PivPoint",
    "piv_parameters",
    "piv_point",
    "piv_residual",
    "piv_residual_of",
    "y_log_derivative_residual",
    "schlesinger_shift",
    "stokes_multipliers",
    "stokes_cyclic_residual",
]

_HALF = mp.mpf(1) / 2


def _check_nu(nu):
    nu = mp.mpf(nu)
    if nu == mp.floor(nu):
        # integer nu makes e^{2 nu pi i} - 1 vanish in the normalisation
        raise ExcludedNu(f"nu = {nu} is an excluded integer value")
    return nu


def piv_parameters(nu, b):
    """Return (Theta, Theta_inf) for given (nu, b)."""
    return (-mp.mpf(b), mp.mpf(nu) + mp.mpf(b))


def _c_norm(nu, b, ctx):
    """Normalisation constant multiplying the closed form of y."""
    denom = gamma(nu, ctx) * (mp.expjpi(2 * nu) - 1)
    root_pi = mp.sqrt(mp.pi)
    i = mp.mpc(0, 1)
    if b == 0:
        return mp.power(2, nu + 1) * root_pi * i / denom
    if b == _HALF:
        return mp.power(2, nu + mp.mpf(3) / 2) * root_pi / denom
    if b == 1:
        return -mp.power(2, nu + 2) * root_pi * i / denom
    raise UnsupportedClosedForm(f"no closed form for b = {b}")


@dataclass
class PivPoint:
    """u, u', y and derived functions of Painleve IV at one point s."""

    nu: object
    b: object
    s: object
    u: object
    du: object
    y: object
    K: object
    dK: object
    H: object


def _ratio_f(mu, s, ctx):
    """F_mu(s) = sqrt(2) D_mu'(sqrt2 s) / D_mu(sqrt2 s) and its derivative.

    F' follows from the Weber equation: F_mu' = 2(s^2 - mu - 1/2) - F_mu^2
    in the variable s (z = sqrt2 s).
    """
    rt2 = mp.sqrt(2)
    z = rt2 * mp.mpc(s)
    d = pcf_d(mu, z, ctx)
    if d == 0:
        raise AtPoleOfU(f"D_{mu} vanishes at z = {z}")
    f = rt2 * pcf_d_prime(mu, z, ctx) / d
    df = 2 * (s * s - mu - _HALF) - f * f
    return f, df


def _wronskian_stack(mu, s, ctx):
    """W_mu = W_z(D_mu, D_{mu+1})(sqrt2 s) scaled by sqrt2, with W', W''.

    Using z = sqrt2 s:  W_mu' = -2 D_mu D_{mu+1},
    W_mu'' = -2 sqrt2 (D_mu' D_{mu+1} + D_mu D_{mu+1}').
    """
    rt2 = mp.sqrt(2)
    z = rt2 * mp.mpc(s)
    d0 = pcf_d(mu, z, ctx)
    d1 = pcf_d(mu + 1, z, ctx)
    d0p = pcf_d_prime(mu, z, ctx)
    d1p = pcf_d_prime(mu + 1, z, ctx)
    w = rt2 * (d0 * d1p - d0p * d1)
    dw = -2 * d0 * d1
    ddw = -2 * rt2 * (d0p * d1 + d0 * d1p)
    return w, dw, ddw


def _u_du(nu, b, s, ctx):
    if b == 0:
        return mp.mpf(0), mp.mpf(0)
    if b == _HALF:
        f1, df1 = _ratio_f(nu, s, ctx)
        f0, df0 = _ratio_f(nu - 1, s, ctx)
        return f1 - f0, df1 - df0
    if b == 1:
        w1, dw1, ddw1 = _wronskian_stack(nu, s, ctx)
        w0, dw0, ddw0 = _wronskian_stack(nu - 1, s, ctx)
        if w1 == 0 or w0 == 0:
            raise AtPoleOfU(f"Wronskian vanishes at s = {s}")
        g1, g0 = dw1 / w1, dw0 / w0
        dg1 = ddw1 / w1 - g1 * g1
        dg0 = ddw0 / w0 - g0 * g0
        return g1 - g0, dg1 - dg0
    raise UnsupportedClosedForm(f"no closed form for b = {b}")


def _y_value(nu, b, s, ctx):
    c = _c_norm(nu, b, ctx)
    if b == 0:
        return c * mp.exp(-s * s)
    rt2 = mp.sqrt(2)
    z = rt2 * mp.mpc(s)
    if b == _HALF:
        num = pcf_d(nu - 1, z, ctx)
        den = pcf_d(nu, z, ctx)
    else:  # b == 1
        num, _, _ = _wronskian_stack(nu - 1, s, ctx)
        den, _, _ = _wronskian_stack(nu, s, ctx)
    if den == 0:
        raise AtPoleOfU(f"denominator of y vanishes at s = {s}")
    return c * num / (mp.exp(s * s) * den)


def piv_point(nu, b, s, ctx: PrecisionContext) -> PivPoint:
    """Evaluate the closed-form Painleve IV data at s (b in {0, 1/2, 1})."""
    b = mp.mpf(b)
    if b not in (mp.mpf(0), _HALF, mp.mpf(1)):
        raise UnsupportedClosedForm(f"closed forms exist only for b in {{0, 1/2, 1}}, got {b}")
    nu = _check_nu(nu)
    with ctx.workprec():
        s = mp.mpc(s)
        theta, theta_inf = piv_parameters(nu, b)
        u, du = _u_du(nu, b, s, ctx)
        y = _y_value(nu, b, s, ctx)
        K = (-du + u * u + 2 * s * u + 4 * theta) / 4
        if u == 0:
            # removable form at the trivial solution u == 0
            if b != 0:
                raise AtPoleOfU(f"u vanishes at s = {s} with b != 0")
            dK = mp.mpf(0)
            H = -s * (K - theta - theta_inf)
        else:
            ddu = (du * du / (2 * u) + mp.mpf(3) / 2 * u ** 3 + 4 * s * u * u
                   + 2 * (s * s + 1 - 2 * theta_inf) * u - 8 * theta * theta / u)
            dK = (-ddu + 2 * u * du + 2 * u + 2 * s * du) / 4
            H = K * (K - 2 * theta) / u - (u / 2 + s) * (K - theta - theta_inf)
        return PivPoint(nu=nu, b=b, s=s, u=u, du=du, y=y, K=K, dK=dK, H=H)


def piv_residual(nu, b, s, ctx: PrecisionContext, h=None):
    """Residual of the PIV equation at s for the closed-form solution.

    u'' is formed by central differences of the closed-form u' and
    compared with the right side of the equation; the return value is
    the relative defect.  Trivial (u == 0, b = 0) points return 0.
    """
    with ctx.workprec():
        s = mp.mpc(s)
        if h is None:
            h = mp.mpf(2) ** (-(ctx.bits // 3))
        hp = ctx.with_bits(ctx.bits * 3 + ctx.guard_bits)
        with hp.workprec():
            _, du_p = _u_du(mp.mpf(nu), mp.mpf(b), s + h, hp)
            _, du_m = _u_du(mp.mpf(nu), mp.mpf(b), s - h, hp)
            u, du = _u_du(mp.mpf(nu), mp.mpf(b), s, hp)
            ddu_fd = (du_p - du_m) / (2 * h)
            if u == 0:
                return mp.mpf(0)
            theta, theta_inf = piv_parameters(nu, b)
            rhs = (du * du / (2 * u) + mp.mpf(3) / 2 * u ** 3 + 4 * s * u * u
                   + 2 * (s * s + 1 - 2 * theta_inf) * u - 8 * theta * theta / u)
            scale = max(abs(ddu_fd), abs(rhs), 1)
        return abs(ddu_fd - rhs) / scale


def y_log_derivative_residual(nu, b, s, ctx: PrecisionContext, h=None):
    """Relative defect of y'/y = -u - 2s, with y' by central differences."""
    with ctx.workprec():
        s = mp.mpc(s)
        if h is None:
            h = mp.mpf(2) ** (-(ctx.bits // 3))
        hp = ctx.with_bits(ctx.bits * 3 + ctx.guard_bits)
        with hp.workprec():
            yp = _y_value(mp.mpf(nu), mp.mpf(b), s + h, hp)
            ym = _y_value(mp.mpf(nu), mp.mpf(b), s - h, hp)
            y0 = _y_value(mp.mpf(nu), mp.mpf(b), s, hp)
            u, _ = _u_du(mp.mpf(nu), mp.mpf(b), s, hp)
            lhs = (yp - ym) / (2 * h * y0)
            rhs = -u - 2 * s
            scale = max(abs(lhs), abs(rhs), 1)
        return abs(lhs - rhs) / scale


def piv_residual_of(u_fn, theta, theta_inf, s, ctx: PrecisionContext, h=None):
    """Relative PIV defect of an arbitrary solution candidate u_fn(s).

    Derivatives come from 5-point central stencils (O(h^4)); evaluation
    runs at triple precision so stencil roundoff stays negligible.
    """
    with ctx.workprec():
        s = mp.mpc(s)
        if h is None:
            h = mp.mpf(2) ** (-(ctx.bits // 8))
        hp = ctx.with_bits(ctx.bits * 3 + ctx.guard_bits)
        with hp.workprec():
            f = [u_fn(s + k * h) for k in (-2, -1, 0, 1, 2)]
            u = f[2]
            du = (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h)
            ddu = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
            if u == 0:
                raise AtPoleOfU("candidate solution vanishes at the sample point")
            theta = mp.mpf(theta)
            theta_inf = mp.mpf(theta_inf)
            rhs = (du * du / (2 * u) + mp.mpf(3) / 2 * u ** 3 + 4 * s * u * u
                   + 2 * (s * s + 1 - 2 * theta_inf) * u - 8 * theta * theta / u)
            scale = max(abs(ddu), abs(rhs), 1)
        return abs(ddu - rhs) / scale


def schlesinger_shift(nu, b, s, ctx: PrecisionContext):
    """Image of u under the Schlesinger transformation raising Theta_inf by 1.

    Returns (u_star, point) where point carries the source data.  The
    transformation is

        u* = -2 K (K + 2b) / (u (K - nu)),

    valid off the zeros of u and of K - nu.
    """
    pt = piv_point(nu, b, s, ctx)
    with ctx.workprec():
        if pt.u == 0:
            raise AtPoleOfU(f"Schlesinger source u vanishes at s = {s}")
        den = pt.u * (pt.K - mp.mpf(nu))
        if den == 0:
            raise AtPoleOfU(f"K - nu vanishes at s = {s}")
        u_star = -2 * pt.K * (pt.K + 2 * mp.mpf(b)) / den
    return u_star, pt


def stokes_multipliers(nu, b, normalisation="canonical", ctx: PrecisionContext = None):
    """Stokes multipliers (s1, s2, s3, s4) of the associated linear problem.

    normalisation:
        'canonical'  -- the raw values
        'case1-sm'   -- rescaled by d = (e^{nu pi i} - e^{-nu pi i})^{-1}
        'case2-sm'   -- rescaled by d = -e^{-nu pi i}

    Rescaling maps (s1, s2, s3, s4) -> (d s1, s2/d, d s3, s4/d), which
    leaves the monodromy invariant.
    """
    if ctx is None:
        ctx = PrecisionContext()
    with ctx.workprec():
        nu = mp.mpf(nu)
        b = mp.mpf(b)
        s1 = mp.expjpi(2 * nu + 3 * b) - mp.expjpi(-b)
        s2 = mp.expjpi(b)
        s3 = mp.expjpi(-(2 * nu + b)) - mp.expjpi(-b)
        s4 = -mp.expjpi(2 * nu + b)
        if normalisation == "canonical":
            return (s1, s2, s3, s4)
        if normalisation == "case1-sm":
            diff = mp.expjpi(nu) - mp.expjpi(-nu)
            if diff == 0:
                raise ExcludedNu(f"nu = {nu} degenerates the case1 normalisation")
            d = 1 / diff
        elif normalisation == "case2-sm":
            d = -mp.expjpi(-nu)
        else:
            raise UnsupportedB(f"unknown normalisation {normalisation!r}")
        return (d * s1, s2 / d, d * s3, s4 / d)


def stokes_cyclic_residual(nu, b, normalisation="canonical", ctx: PrecisionContext = None):
    """Defect in the cyclic relation tying the multipliers to (Theta, Theta_inf).

        (1 + s2 s3) e^{2 pi i Theta_inf}
        + [s1 s4 + (1 + s3 s4)(1 + s1 s2)] e^{-2 pi i Theta_inf}
        = 2 cos(2 pi Theta).
    """
    if ctx is None:
        ctx = PrecisionContext()
    s1, s2, s3, s4 = stokes_multipliers(nu, b, normalisation, ctx)
    with ctx.workprec():
        theta, theta_inf = piv_parameters(nu, b)
        lhs = ((1 + s2 * s3) * mp.expjpi(2 * theta_inf)
               + (s1 * s4 + (1 + s3 * s4) * (1 + s1 * s2)) * mp.expjpi(-2 * theta_inf))
        rhs = 2 * mp.cospi(2 * theta)
        return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1)
