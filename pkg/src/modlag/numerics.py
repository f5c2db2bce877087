"""Configurable-precision numeric services.

Provides the precision context threaded through every computation, a
complex Gamma function built on an argument-shifted Stirling series, an
adaptive Gauss-Legendre path integrator, and a driver that reruns a
computation at doubled precision until the result stabilizes.

mpmath supplies the underlying arbitrary-precision floats; every
algorithm on top of them is implemented here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import mpmath as mp

from .errors import NoConvergence, PoleOfGamma, PrecisionExhausted

__all__ = [
    "PrecisionContext",
    "PathSegment",
    "gamma",
    "integrate_path",
    "with_escalating_precision",
    "pairwise_sum",
]


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision in bits plus the tolerance policy derived from it.

    target_rel_tol is the requested relative accuracy of results; it can
    never be tighter than what the working precision supports, hence the
    guard-bit invariant.
    """

    bits: int = 192
    guard_bits: int = 48
    target_rel_tol: mp.mpf = None

    def __post_init__(self):
        if self.bits < 64:
            raise ValueError("bits must be >= 64")
        if self.guard_bits < 32:
            raise ValueError("guard_bits must be >= 32")
        tol = self.target_rel_tol
        if tol is None:
            tol = mp.mpf(2) ** (-(self.bits - self.guard_bits))
            object.__setattr__(self, "target_rel_tol", tol)
        if tol < mp.mpf(2) ** (-(self.bits - self.guard_bits)):
            raise ValueError("target_rel_tol below 2^(-bits+guard_bits)")

    def workprec(self):
        return mp.workprec(self.bits)

    def with_bits(self, bits: int) -> "PrecisionContext":
        bits = int(bits)
        return PrecisionContext(bits=bits, guard_bits=self.guard_bits,
                                target_rel_tol=mp.mpf(2) ** (-(bits - self.guard_bits)))

    @property
    def dps(self) -> int:
        return int(self.bits * 0.3010299956639812)


def pairwise_sum(values: Sequence) -> mp.mpc:
    """Deterministic pairwise tree reduction."""
    vals = list(values)
    if not vals:
        return mp.mpf(0)
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


# ----------------------------------------------------------------------
# Gamma
# ----------------------------------------------------------------------

def _stirling_loggamma(z, nterms):
    # ln Gamma via the Stirling series; caller guarantees |z| large enough.
    w = mp.mpc(z)
    s = (w - mp.mpf(1) / 2) * mp.log(w) - w + mp.log(2 * mp.pi) / 2
    w2 = w * w
    wp = w
    for k in range(1, nterms + 1):
        s += mp.bernoulli(2 * k) / (2 * k * (2 * k - 1) * wp)
        wp *= w2
    return s


def gamma(z, ctx: PrecisionContext):
    """Complex Gamma with relative error <= ctx.target_rel_tol.

    Argument-shifted Stirling series; the reflection formula is applied
    for Re z < 1/2 so the shift count stays bounded.
    """
    with mp.workprec(ctx.bits + ctx.guard_bits):
        z = mp.mpc(z)
        if abs(mp.im(z)) <= ctx.target_rel_tol * max(1, abs(z)):
            x = mp.re(z)
            if x <= 0.5 and abs(x - mp.nint(x)) <= ctx.target_rel_tol * max(1, abs(x)) \
                    and mp.nint(x) <= 0:
                raise PoleOfGamma(f"gamma pole near z={mp.nstr(x, 8)}")
        if mp.re(z) < 0.5:
            val = mp.pi / (mp.sin(mp.pi * z) * gamma(1 - z, ctx))
        else:
            # shift until the Stirling remainder is below tolerance
            rmin = max(12, ctx.bits // 6 + 4)
            nterms = rmin
            shift = 0
            while abs(z + shift) < rmin:
                shift += 1
            lg = _stirling_loggamma(z + shift, nterms)
            val = mp.exp(lg)
            for j in range(shift):
                val /= (z + j)
        if abs(mp.im(val)) <= mp.mpf(2) ** (-ctx.bits) * abs(val) * 16 and mp.im(z) == 0:
            val = mp.mpc(mp.re(val), 0)
    return val


# ----------------------------------------------------------------------
# Path segments and Gauss-Legendre quadrature
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class PathSegment:
    """One piece of an integration path, parameterized over t in [-1, 1]."""

    kind: str  # "line" | "circular_arc"
    z0: complex = None
    z1: complex = None
    center: complex = None
    radius: float = None
    theta0: float = None
    theta1: float = None

    @staticmethod
    def line(z0, z1) -> "PathSegment":
        return PathSegment(kind="line", z0=mp.mpc(z0), z1=mp.mpc(z1))

    @staticmethod
    def circular_arc(center, radius, theta0, theta1) -> "PathSegment":
        return PathSegment(kind="circular_arc", center=mp.mpc(center),
                           radius=mp.mpf(radius), theta0=mp.mpf(theta0),
                           theta1=mp.mpf(theta1))

    def point(self, t):
        if self.kind == "line":
            return self.z0 + (t + 1) / 2 * (self.z1 - self.z0)
        th = self.theta0 + (t + 1) / 2 * (self.theta1 - self.theta0)
        return self.center + self.radius * mp.exp(mp.mpc(0, 1) * th)

    def dpoint(self, t):
        """dz/dt."""
        if self.kind == "line":
            return (self.z1 - self.z0) / 2
        th = self.theta0 + (t + 1) / 2 * (self.theta1 - self.theta0)
        return self.radius * (self.theta1 - self.theta0) / 2 \
            * mp.mpc(0, 1) * mp.exp(mp.mpc(0, 1) * th)

    def start(self):
        return self.point(mp.mpf(-1))

    def end(self):
        return self.point(mp.mpf(1))


_GL_CACHE = {}


def gauss_legendre_nodes(p: int, prec: int):
    """Nodes and weights of the p-point rule on [-1, 1].

    Computed at the working precision by Newton iteration on the Legendre
    polynomial (three-term recurrence for values and derivatives), cached
    per (p, prec).
    """
    key = (p, prec)
    if key in _GL_CACHE:
        return _GL_CACHE[key]
    with mp.workprec(prec + 32):
        nodes, weights = [], []
        for k in range(1, p + 1):
            # Chebyshev-like initial guess
            x = mp.cos(mp.pi * (k - mp.mpf(1) / 4) / (p + mp.mpf(1) / 2))
            for _ in range(200):
                p0, p1 = mp.mpf(1), x
                for j in range(2, p + 1):
                    p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
                dp = p * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < mp.mpf(2) ** (-(prec + 16)):
                    break
            p0, p1 = mp.mpf(1), x
            for j in range(2, p + 1):
                p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
            dp = p * (x * p1 - p0) / (x * x - 1)
            nodes.append(x)
            weights.append(2 / ((1 - x * x) * dp * dp))
    _GL_CACHE[key] = (nodes, weights)
    return _GL_CACHE[key]


def _panel(f, seg: PathSegment, a, b, p, prec):
    """p-point Gauss-Legendre estimate of the integral over t in [a, b]."""
    nodes, weights = gauss_legendre_nodes(p, prec)
    half = (b - a) / 2
    mid = (a + b) / 2
    terms = []
    for x, w in zip(nodes, weights):
        t = mid + half * x
        terms.append(w * f(seg.point(t)) * seg.dpoint(t))
    return pairwise_sum(terms) * half


def integrate_path(f, path, ctx: PrecisionContext, points: int = 16,
                   max_panels: int = 4096):
    """Adaptive Gauss-Legendre integration of f along a list of segments.

    Per-panel error is estimated as the difference between the p-point and
    2p-point rules; panels are bisected until the estimate is below
    target_rel_tol times the largest panel magnitude seen so far.
    Returns (value, error_estimate).
    """
    if isinstance(path, PathSegment):
        path = [path]
    with ctx.workprec():
        tol = mp.mpf(ctx.target_rel_tol)
        panel_values = []
        err_total = mp.mpf(0)
        max_mag = mp.mpf(0)
        npanels = 0
        for seg in path:
            stack = [(mp.mpf(-1), mp.mpf(1), 0)]
            while stack:
                a, b, depth = stack.pop()
                npanels += 1
                if npanels > max_panels:
                    raise NoConvergence("panel cap exceeded in integrate_path")
                v1 = _panel(f, seg, a, b, points, ctx.bits)
                v2 = _panel(f, seg, a, b, 2 * points, ctx.bits)
                err = abs(v2 - v1)
                max_mag = max(max_mag, abs(v2))
                if err <= tol * max(max_mag, mp.mpf(2) ** (-ctx.bits)) / 64 or depth >= 40:
                    panel_values.append(v2)
                    err_total += err
                else:
                    m = (a + b) / 2
                    stack.append((m, b, depth + 1))
                    stack.append((a, m, depth + 1))
        value = pairwise_sum(panel_values)
    return value, err_total


# ----------------------------------------------------------------------
# Precision escalation
# ----------------------------------------------------------------------

def _flatten(v):
    if isinstance(v, (tuple, list)):
        out = []
        for x in v:
            out.extend(_flatten(x))
        return out
    return [mp.mpc(v)]


def _results_agree(a, b, tol):
    fa, fb = _flatten(a), _flatten(b)
    if len(fa) != len(fb):
        return False
    for x, y in zip(fa, fb):
        scale = max(mp.mpf(1), abs(x), abs(y))
        if abs(x - y) > tol * scale:
            return False
    return True


def with_escalating_precision(compute: Callable[[PrecisionContext], object],
                              start_ctx: PrecisionContext, max_bits: int):
    """Rerun compute with doubled bits until two successive results agree.

    compute must be deterministic for a fixed context.  Returns
    (value, bits) where value is the confirming higher-precision result.
    """
    bits = start_ctx.bits
    prev = compute(start_ctx)
    while True:
        bits *= 2
        if bits > max_bits:
            raise PrecisionExhausted(f"no stabilization up to {max_bits} bits")
        ctx = start_ctx.with_bits(bits)
        cur = compute(ctx)
        if _results_agree(prev, cur, start_ctx.target_rel_tol):
            return cur, bits
        prev = cur
