"""Modified Laguerre weight, contour moments, and planar geometry.

The weight is

    w(z) = z^alpha e^{-N z} (z - 1)^{2b},

with both power factors cut along the positive real directions
(arg z and arg(z - 1) taken in (0, 2pi)), integrated over a Hankel-type
contour Sigma that comes in along Im z = -eps, loops the origin through
the negative real axis, and leaves along Im z = +eps.

The same module carries the geometry used by the zero-distribution
results: the Szego curve |z e^{1-z}| = 1, the turning points beta, the
phase function phi_n, and a tracer for the level curve Gamma_{0,n} on
which Re phi_n = 0.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field

import mpmath as mp

from .errors import (
    ExcludedNu,
    NoConvergence,
    OnCut,
    PathCrossesCut,
    TraceStalled,
    UnsupportedClosedForm,
)
from .numerics import PathSegment, PrecisionContext, gamma, gauss_legendre_nodes, integrate_path
from .errors import PoleOfGamma

__all__ = [
    "ModelParams",
    "ContourSpec",
    "MomentTable",
    "weight_eval",
    "default_contour",
    "moments",
    "szego_membership",
    "szego_curve_points",
    "szego_distance",
    "beta_points",
    "r_n",
    "phi_n",
    "gamma0_trace",
]


@dataclass(frozen=True)
class ModelParams:
    """Parameters (nu, b, L, n) of the double-scaled weight.

    Derived quantities are evaluated lazily at the ambient precision:
    alpha = -n + nu, N = n + sqrt(2) L n^{1/2}, t = N/n, A_n = 1 - nu/n.
    """

    nu: float
    b: float
    L: float
    n: int

    def __post_init__(self):
        nu = mp.mpf(self.nu)
        if nu >= 0 and nu == mp.floor(nu):
            raise ExcludedNu(f"nu = {self.nu} lies in the excluded set N0")
        if self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")

    @property
    def alpha(self):
        return -self.n + mp.mpf(self.nu)

    @property
    def N(self):
        return self.n + mp.sqrt(2) * mp.mpf(self.L) * mp.sqrt(self.n)

    @property
    def t(self):
        return self.N / self.n

    @property
    def A_n(self):
        return 1 - mp.mpf(self.nu) / self.n

    def key_fields(self):
        return {"nu": repr(self.nu), "b": repr(self.b), "L": repr(self.L), "n": self.n}


@dataclass(frozen=True)
class ContourSpec:
    """Hankel loop: radius rho about 0, rays at Im z = +-eps out to Re z = R."""

    rho: float
    eps: float
    R: float

    def __post_init__(self):
        if not (0 < self.eps < self.rho):
            raise ValueError("require 0 < eps < rho")
        if self.R <= 1 + self.eps:
            raise ValueError("require R > 1 + eps")

    def segments(self):
        """Oriented segments: in along the lower ray, around, out along the upper."""
        rho = mp.mpf(self.rho)
        eps = mp.mpf(self.eps)
        R = mp.mpf(self.R)
        x0 = mp.sqrt(rho * rho - eps * eps)
        th0 = mp.atan2(eps, x0)
        return [
            PathSegment.line(mp.mpc(R, -eps), mp.mpc(x0, -eps)),
            PathSegment.circular_arc(0, rho, -th0, -2 * mp.pi + th0),
            PathSegment.line(mp.mpc(x0, eps), mp.mpc(R, eps)),
        ]


@dataclass
class MomentTable:
    params: ModelParams
    prec_bits: int
    method: str
    values: list = field(default_factory=list)

    def __len__(self):
        return len(self.values)


def _arg_cut(z):
    """arg z in (0, 2pi) (cut along the nonnegative real axis)."""
    a = mp.arg(z)
    if a <= 0:
        a += 2 * mp.pi
    return a


def weight_eval(z, p: ModelParams, ctx: PrecisionContext = None):
    """w(z) = z^alpha e^{-Nz} (z-1)^{2b} with both cuts along [0, inf)."""
    if ctx is None:
        ctx = PrecisionContext()
    with ctx.workprec():
        z = mp.mpc(z)
        tol = ctx.target_rel_tol * max(1, abs(z))
        if abs(mp.im(z)) <= tol and mp.re(z) >= -tol:
            raise OnCut(f"z = {z} lies on the cut [0, inf)")
        alpha = p.alpha
        b2 = 2 * mp.mpf(p.b)
        za = mp.exp(alpha * (mp.log(abs(z)) + mp.mpc(0, 1) * _arg_cut(z)))
        w1 = z - 1
        zb = mp.exp(b2 * (mp.log(abs(w1)) + mp.mpc(0, 1) * _arg_cut(w1))) if b2 != 0 else mp.mpf(1)
        return za * mp.exp(-p.N * z) * zb


def default_contour(p: ModelParams, ctx: PrecisionContext = None, m: int = 0) -> ContourSpec:
    """Contour sized so that the truncated tail is below roundoff.

    m is the highest moment order that will be integrated; it enters the
    truncation bound through the z^m growth of the integrand.
    """
    if ctx is None:
        ctx = PrecisionContext()
    with ctx.workprec():
        t = p.t
        rho = min(1 / t, mp.mpf("0.9"))
        eps = min(mp.mpf("0.4"), rho / 2)
        # (n + nu + m) ln R - N R < -(bits + 10) ln 2 - n (t rho - ln rho)
        target = -(ctx.bits + 10) * mp.log(2) - p.n * (t * rho - mp.log(rho))
        R = mp.mpf(max(2, 1 + float(eps) + 0.5))
        for _ in range(200):
            val = (p.n + mp.mpf(p.nu) + m) * mp.log(R) - p.N * R
            if val < target:
                break
            R *= mp.mpf("1.5")
        return ContourSpec(rho=float(rho), eps=float(eps), R=float(R))


def _rgamma(z, ctx):
    try:
        return 1 / gamma(z, ctx)
    except PoleOfGamma:
        return mp.mpf(0)


def _mu_b0(a_exp, N, ctx):
    """Moment of z^{a_exp} e^{-Nz} over the contour, in closed form.

    mu = -2 pi i e^{i pi (a+1)} / (Gamma(-a) N^{a+1}); entire in a.
    """
    return (-2 * mp.pi * mp.mpc(0, 1) * mp.expjpi(a_exp + 1)
            * _rgamma(-a_exp, ctx) / mp.power(N, a_exp + 1))


def _digits_for_bits(bits):
    return int(mp.ceil(bits * mp.mpf("0.3011"))) + 5


def _cache_path(cache_dir, p: ModelParams, method, bits):
    key = json.dumps({**p.key_fields(), "method": method, "bits": bits}, sort_keys=True)
    h = hashlib.sha256(key.encode()).hexdigest()[:32]
    return os.path.join(cache_dir, f"mu-{h}.json")


def _cache_load(path, p, method, bits, m):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, ValueError):
        return None
    if len(doc.get("mu", [])) < m + 1:
        return None
    vals = [mp.mpc(mp.mpf(re), mp.mpf(im)) for re, im in doc["mu"][: m + 1]]
    return MomentTable(params=p, prec_bits=bits, method=method, values=vals)


def _cache_store(path, p, method, bits, values):
    digits = _digits_for_bits(bits)
    doc = {
        "params": p.key_fields(),
        "bits": bits,
        "method": method,
        "mu": [[mp.nstr(mp.re(v), digits), mp.nstr(mp.im(v), digits)] for v in values],
    }
    os.makedirs(os.path.dirname(path), exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(doc, fh)
        os.replace(tmp, path)
    except OSError:
        try:
            os.unlink(tmp)
        except OSError:
            pass


def _composite_vector(p, m, seg, panels, points, work):
    """All moments over one segment by composite Gauss-Legendre.

    The weight is evaluated once per node; the powers z^j follow by
    cumulative multiplication, so the cost is one weight evaluation plus
    m multiplies per node.
    """
    xs, ws = gauss_legendre_nodes(points, mp.mp.prec)
    acc = [mp.mpc(0)] * (m + 1)
    for k in range(panels):
        t0 = -1 + mp.mpf(2) * k / panels
        t1 = -1 + mp.mpf(2) * (k + 1) / panels
        mid = (t0 + t1) / 2
        half = (t1 - t0) / 2
        for x, w in zip(xs, ws):
            t = mid + half * x
            z = seg.point(t)
            base = w * half * seg.dpoint(t) * weight_eval(z, p, work)
            for j in range(m + 1):
                acc[j] += base
                base *= z
    return acc


def _quad_moments(p, m, contour, work, rel_tol):
    """Vectorized contour moments with panel-doubling verification.

    Each segment starts from a phase-count heuristic for the panel
    number and doubles until two successive rules agree to rel_tol
    (relative to the largest moment magnitude on the contour).
    """
    rho = mp.mpf(contour.rho)
    # winding of z^{alpha+j} plus the e^{-Nz} phase fixes the resolution
    osc = abs(p.alpha) + m + p.N * rho / (2 * mp.pi)
    totals = None
    for seg, init in zip(contour.segments(),
                         (int(p.N * contour.R / 8) + 8,
                          int(osc) + 8,
                          int(p.N * contour.R / 8) + 8)):
        panels = init
        prev = None
        for _ in range(12):
            cur = _composite_vector(p, m, seg, panels, 32, work)
            if prev is not None:
                scale = max(max(abs(v) for v in cur), mp.mpf(1) * 0)
                scale = scale if scale > 0 else mp.mpf(1)
                diff = max(abs(a - b) for a, b in zip(cur, prev))
                if diff <= rel_tol * scale:
                    break
            prev = cur
            panels *= 2
        else:
            raise NoConvergence("moment quadrature did not stabilise")
        totals = cur if totals is None else [a + b for a, b in zip(totals, cur)]
    return totals


def moments(p: ModelParams, m: int, ctx: PrecisionContext,
            method: str = "closed_form", contour: ContourSpec = None,
            cache_dir: str = None) -> MomentTable:
    """Moments mu_0..mu_m of the weight over the contour.

    method 'closed_form' needs 2b in N0 (binomial expansion of the
    (z-1)^{2b} factor over Hankel-Gamma moments); 'quadrature' integrates
    z^j w(z) along the contour at an escalated working precision that
    absorbs the contour maximum of the integrand.
    """
    if cache_dir is None:
        cache_dir = os.environ.get("MODLAG_CACHE_DIR")
    if cache_dir:
        path = _cache_path(cache_dir, p, method, ctx.bits)
        hit = _cache_load(path, p, method, ctx.bits, m)
        if hit is not None:
            return hit

    if method == "closed_form":
        b2 = 2 * mp.mpf(p.b)
        if b2 != mp.floor(b2) or b2 < 0:
            raise UnsupportedClosedForm(f"closed form needs 2b in N0, got b = {p.b}")
        k_max = int(b2)
        with ctx.workprec():
            base = [_mu_b0(p.alpha + j, p.N, ctx) for j in range(m + k_max + 1)]
            vals = []
            for j in range(m + 1):
                acc = mp.mpc(0)
                for k in range(k_max + 1):
                    acc += mp.binomial(k_max, k) * (-1) ** (k_max - k) * base[j + k]
                vals.append(acc)
    elif method == "quadrature":
        if contour is None:
            contour = default_contour(p, ctx, m=m)
        rho = mp.mpf(contour.rho)
        extra = int(mp.ceil(p.n * (p.t * rho - mp.log(rho)) / mp.log(2))) + 64
        work = ctx.with_bits(ctx.bits + extra)
        with work.workprec():
            vals = _quad_moments(p, m, contour, work,
                                 rel_tol=mp.mpf(2) ** (-(ctx.bits - ctx.guard_bits)))
        with ctx.workprec():
            vals = [mp.mpc(v) for v in vals]
    else:
        raise ValueError(f"unknown moment method {method!r}")

    tbl = MomentTable(params=p, prec_bits=ctx.bits, method=method, values=vals)
    if cache_dir:
        _cache_store(path, p, method, ctx.bits, vals)
    return tbl


# ---------------------------------------------------------------------------
# Szego curve


def szego_membership(z):
    """|z e^{1-z}| - 1; the Szego curve is its zero set within |z| <= 1."""
    z = mp.mpc(z)
    return abs(z * mp.exp(1 - z)) - 1


def szego_curve_points(samples: int = 512, ctx: PrecisionContext = None):
    """Points of the Szego curve, ordered by angle from -pi to pi.

    For each theta, the radius solves ln r + 1 - r cos theta = 0 on
    (0, 1] (Newton iteration; the left side is increasing in r there).
    """
    if ctx is None:
        ctx = PrecisionContext()
    with ctx.workprec():
        pts = []
        half = samples // 2
        for k in range(-half, half + 1):
            th = mp.pi * k / half
            c = mp.cos(th)
            r = mp.mpf("0.5")
            for _ in range(80):
                f = mp.log(r) + 1 - r * c
                df = 1 / r - c
                step = f / df
                r_new = r - step
                if r_new <= 0:
                    r_new = r / 2
                if r_new > 1:
                    r_new = (r + 1) / 2
                if abs(r_new - r) < ctx.target_rel_tol * r:
                    r = r_new
                    break
                r = r_new
            pts.append(r * mp.exp(mp.mpc(0, 1) * th))
        return pts


_SZEGO_CACHE = {}


def _szego_polyline(ctx):
    key = ctx.bits
    if key not in _SZEGO_CACHE:
        _SZEGO_CACHE[key] = szego_curve_points(2048, ctx)
    return _SZEGO_CACHE[key]


def szego_distance(z, ctx: PrecisionContext = None):
    """Distance from z to the Szego curve via a refined polyline minimum."""
    if ctx is None:
        ctx = PrecisionContext()
    with ctx.workprec():
        z = mp.mpc(z)
        pts = _szego_polyline(ctx)
        dists = [abs(z - p) for p in pts]
        k = dists.index(min(dists))
        # refine between the neighbours of the best sample
        lo = max(k - 1, 0)
        hi = min(k + 1, len(pts) - 1)
        a, bpt = pts[lo], pts[hi]
        best = dists[k]
        m_steps = 64
        for j in range(m_steps + 1):
            q = a + (bpt - a) * j / m_steps
            # project the chord point back onto the curve radially
            th = mp.arg(q)
            c = mp.cos(th)
            r = abs(q)
            for _ in range(40):
                f = mp.log(r) + 1 - r * c
                r = r - f / (1 / r - c)
                if r <= 0:
                    r = mp.mpf("1e-6")
            d = abs(z - r * mp.exp(mp.mpc(0, 1) * th))
            if d < best:
                best = d
        return best


# ---------------------------------------------------------------------------
# beta points, R_n, phi_n


def beta_points(p: ModelParams):
    """Turning points of the finite-n phase.

    Case I (nu > 0): real pair (beta1, beta2); Case II (nu < 0): the
    complex beta with positive imaginary part (conjugate implied).
    """
    nu = mp.mpf(p.nu)
    if nu > 0:
        if nu == mp.floor(nu):
            raise ExcludedNu(f"nu = {p.nu} in N")
        rt = mp.sqrt(nu / p.n)
        return (1 + nu / p.n - 2 * rt, 1 + nu / p.n + 2 * rt)
    return 1 + nu / p.n + 2 * mp.mpc(0, 1) * mp.sqrt(-nu / p.n)


def _cut_data(p: ModelParams):
    """Midpoint m and half-length c of the branch cut of R_n."""
    bp = beta_points(p)
    if isinstance(bp, tuple):
        b1, b2 = bp
        return (b1 + b2) / 2, (b2 - b1) / 2
    return mp.re(bp), mp.mpc(0, 1) * mp.im(bp)


def r_n(z, p: ModelParams):
    """R_n(z) = (z - m) sqrt(1 - (c/(z-m))^2), branch with R_n(z) ~ z at infinity.

    The cut is [beta1, beta2] (Case I) or the vertical segment joining
    beta-bar and beta (Case II).
    """
    m, c = _cut_data(p)
    z = mp.mpc(z)
    w = z - m
    if w == 0:
        raise PathCrossesCut("R_n evaluated at the cut midpoint")
    return w * mp.sqrt(1 - (c / w) ** 2)


def _phi_start(p: ModelParams):
    bp = beta_points(p)
    return bp[0] if isinstance(bp, tuple) else bp


def _seg_near_origin(a, bpt, margin):
    """True if the segment [a, b] passes within margin of 0."""
    d = bpt - a
    L2 = abs(d) ** 2
    if L2 == 0:
        return abs(a) < margin
    t = -mp.re(a * mp.conj(d)) / L2
    t = min(max(t, 0), 1)
    return abs(a + t * d) < margin


def _seg_hits_cut(a, bpt, p: ModelParams):
    m, c = _cut_data(p)
    # parametrize cut as m + s*c, s in [-1, 1]
    d = bpt - a
    den = mp.re(d) * mp.im(c) - mp.im(d) * mp.re(c)
    if abs(den) < mp.mpf(2) ** (-mp.mp.prec + 8) * max(1, abs(d) * abs(c)):
        return False  # parallel; endpoints are off the cut by construction
    rhs = m - a
    t = (mp.re(rhs) * mp.im(c) - mp.im(rhs) * mp.re(c)) / den
    s = (mp.re(d) * mp.im(rhs) - mp.im(d) * mp.re(rhs)) / den
    return 0 < t < 1 and -1 < s < 1


def phi_n(z, p: ModelParams, ctx: PrecisionContext, prefer_upper=None):
    """phi_n(z) = (1/2) Int_{beta}^z R_n(s)/s ds along a cut-avoiding path.

    The base point is beta_{1,n} in Case I and beta_n in Case II.  A
    straight path is used when it stays clear of the origin and the cut;
    otherwise a single elevated waypoint routes around them, through the
    half-plane of z (upper for real z, or as given by prefer_upper).
    """
    with ctx.workprec():
        z = mp.mpc(z)
        start = _phi_start(p)
        margin = mp.mpf("0.05") * min(1, abs(z)) if z != 0 else mp.mpf("0.05")

        def integrand(s):
            return r_n(s, p) / s / 2

        if not _seg_hits_cut(start, z, p) and not _seg_near_origin(start, z, margin):
            path = [PathSegment.line(start, z)]
        else:
            if prefer_upper is None:
                prefer_upper = mp.im(z) >= 0
            sgn = 1 if prefer_upper else -1
            h = 1.5 * max(1, abs(z), abs(start))
            w = mp.mpc(0, sgn * h)
            for seg in ((start, w), (w, z)):
                if _seg_hits_cut(*seg, p):
                    raise PathCrossesCut(f"no simple path from {start} to {z}")
            path = [PathSegment.line(start, w), PathSegment.line(w, z)]
        val, _err = integrate_path(integrand, path, ctx)
        return val


# ---------------------------------------------------------------------------
# Gamma_{0,n} tracing


def _re_phi_increment(z0, z1, dphi, order=12):
    """Re Int_{z0}^{z1} phi'(s) ds by fixed Gauss-Legendre on the short hop."""
    xs, ws = gauss_legendre_nodes(order, mp.mp.prec)
    mid = (z0 + z1) / 2
    half = (z1 - z0) / 2
    acc = mp.mpf(0)
    for x, w in zip(xs, ws):
        acc += w * mp.re(dphi(mid + half * x) * half)
    return acc


def gamma0_trace(p: ModelParams, step: float, ctx: PrecisionContext):
    """Polyline of the level curve Gamma_{0,n} = {Re phi_n = 0}.

    Case I returns a closed loop around 0 (last vertex == first); Case II
    an open arc from beta-bar through the negative axis to beta.  Tracing
    runs predictor (level-set tangent) / corrector (Newton transverse to
    it) with Re phi maintained incrementally from the seed on the
    negative real axis.
    """
    with ctx.workprec():
        step = mp.mpf(step)
        bp = beta_points(p)
        case1 = isinstance(bp, tuple)
        end_pt = bp[0] if case1 else bp

        # seed: the unique negative-axis crossing of Re phi_n.  One full
        # path integral anchors the value; along the axis the integrand
        # R_n(x)/(2x) is real, so further values come from cheap real
        # increments.
        def axis_inc(x0, x1):
            v, _e = integrate_path(lambda s: r_n(s, p) / s / 2, [PathSegment.line(x0, x1)], ctx)
            return mp.re(v)

        lo, hi = mp.mpf(-1), mp.mpf("-1e-6")
        flo = mp.re(phi_n(lo, p, ctx))
        fhi = flo + axis_inc(lo, hi)
        while flo * fhi > 0 and lo > -8:
            flo += axis_inc(lo, 2 * lo)
            lo *= 2
        if flo * fhi > 0:
            raise TraceStalled("no sign change of Re phi_n on the negative axis")
        while hi - lo > mp.mpf("1e-13"):
            mid = (lo + hi) / 2
            fm = flo + axis_inc(lo, mid)
            if flo * fm <= 0:
                hi, fhi = mid, fm
            else:
                lo, flo = mid, fm
        seed = (lo + hi) / 2

        def dphi(z):
            return r_n(z, p) / (2 * z)

        corr_tol = mp.mpf(10) ** (-12)

        def correct(z, f):
            for _ in range(60):
                g = dphi(z)
                if g == 0:
                    raise TraceStalled(f"phi' vanishes at {z}")
                dz = -f * mp.conj(g) / abs(g) ** 2
                f += _re_phi_increment(z, z + dz, dphi)
                z = z + dz
                if abs(f) <= corr_tol / 100:
                    return z, f
            raise TraceStalled(f"corrector failed near {z}")

        # trace the upper half from the seed; the lower half is the mirror
        pts = [seed]
        z = mp.mpc(seed)
        f = mp.re(phi_n(seed, p, ctx))
        z, f = correct(z, f)
        pts[0] = z
        max_steps = int(40 / float(step)) + 1000
        for _ in range(max_steps):
            g = dphi(z)
            tang = mp.mpc(0, 1) * mp.conj(g) / abs(g)
            if len(pts) == 1:
                if mp.im(tang) < 0:
                    tang = -tang
            else:
                prev_dir = pts[-1] - pts[-2]
                if mp.re(tang * mp.conj(prev_dir)) < 0:
                    tang = -tang
            z_pred = z + step * tang
            f_pred = f + _re_phi_increment(z, z_pred, dphi)
            z_new, f = correct(z_pred, f_pred)
            pts.append(z_new)
            z = z_new
            if abs(z - end_pt) < mp.mpf("1.2") * step and len(pts) > 3:
                break
        else:
            raise TraceStalled("trace did not reach the endpoint")

        upper = pts  # seed -> ... -> near the endpoint, in the upper half-plane
        if case1:
            # closed loop beta1 -> upper (reversed) -> seed -> lower mirror -> beta1
            poly = [mp.mpc(end_pt)] + list(reversed(upper))
            poly += [mp.conj(q) for q in upper[1:]]
            poly.append(mp.mpc(end_pt))
            return poly
        # open arc beta-bar -> lower mirror -> seed -> upper -> beta
        poly = [mp.conj(mp.mpc(end_pt))] + [mp.conj(q) for q in reversed(upper[1:])]
        poly += upper
        poly.append(mp.mpc(end_pt))
        return poly
