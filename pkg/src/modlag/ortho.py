"""Monic orthogonal polynomials from moments.

The primary path is the Chebyshev algorithm on mixed moments
(O(n^2) operations); a Hankel-determinant ratio serves as an
independent oracle.  For b = 0 the weight reduces to a rotated
Laguerre weight and the recurrence coefficients are known exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath as mp

from .errors import ExistenceFailure, NoConvergence, RequiresBZero
from .numerics import PrecisionContext
from .weight_moments import ModelParams, MomentTable

__all__ = [
    "RecurrenceTable",
    "ZeroSet",
    "recurrence_from_moments",
    "hankel_ratio_oracle",
    "laguerre_exact",
    "poly_coeffs",
    "zeros",
]


@dataclass
class RecurrenceTable:
    """Three-term recurrence data: pi_{k+1} = (z - b_k) pi_k - a_k pi_{k-1}."""

    params: ModelParams
    a: list = field(default_factory=list)   # a_1 .. a_n
    b: list = field(default_factory=list)   # b_0 .. b_n
    existence_ok: list = field(default_factory=list)


@dataclass
class ZeroSet:
    degree: int
    zeros: list
    max_residual: object


def recurrence_from_moments(tbl: MomentTable, n: int, ctx: PrecisionContext) -> RecurrenceTable:
    """Coefficients a_1..a_n, b_0..b_n by the Chebyshev moment algorithm.

    Needs mu_0..mu_{2n+1}.  Mixed moments sigma_{k,l} satisfy

        sigma_{k,l} = sigma_{k-1,l+1} - b_{k-1} sigma_{k-1,l} - a_{k-1} sigma_{k-2,l},
        a_k = sigma_{k,k} / sigma_{k-1,k-1},
        b_k = sigma_{k,k+1}/sigma_{k,k} - sigma_{k-1,k}/sigma_{k-1,k-1}.

    A vanishing sigma_{k,k} means the Hankel determinant D_{k+1}
    vanishes and pi_{k+1} fails to exist; this raises ExistenceFailure.
    """
    mu = tbl.values
    if len(mu) < 2 * n + 2:
        raise ValueError(f"need mu_0..mu_{2 * n + 1}, have {len(mu)} moments")
    with ctx.workprec():
        if mu[0] == 0:
            raise ExistenceFailure(0, "mu_0 = 0")
        floor = mp.mpf(2) ** (-(ctx.bits // 2))
        a_list, b_list, ok = [], [], [True]
        b_list.append(mu[1] / mu[0])
        prev = {l: mp.mpc(mu[l]) for l in range(len(mu))}       # sigma_{k-1, .}
        pprev = {}                                              # sigma_{k-2, .}
        for k in range(1, n + 1):
            cur = {}
            bk1 = b_list[k - 1]
            ak1 = a_list[k - 2] if k >= 2 else mp.mpc(0)
            for l in range(k, len(mu) - k):
                v = prev[l + 1] - bk1 * prev[l]
                if k >= 2:
                    v -= ak1 * pprev[l]
                cur[l] = v
            dkk = cur[k]
            # the diagonal ratio is a_k itself; a collapse of that ratio
            # (not of the raw magnitude, which decays geometrically) is
            # what signals a vanishing Hankel determinant
            good = abs(dkk) >= floor * abs(prev[k - 1])
            ok.append(good)
            if not good:
                raise ExistenceFailure(k, f"sigma_{{{k},{k}}} below the existence floor")
            a_list.append(dkk / prev[k - 1])
            b_list.append(cur[k + 1] / dkk - prev[k] / prev[k - 1])
            pprev, prev = prev, cur
        return RecurrenceTable(params=tbl.params, a=a_list, b=b_list, existence_ok=ok)


def _det_full_pivot(rows, ctx):
    """Determinant by Gaussian elimination with full pivoting."""
    m = [list(r) for r in rows]
    k = len(m)
    det = mp.mpc(1)
    for i in range(k):
        # locate the largest remaining entry
        piv_r, piv_c, piv = i, i, abs(m[i][i])
        for r in range(i, k):
            for c in range(i, k):
                if abs(m[r][c]) > piv:
                    piv_r, piv_c, piv = r, c, abs(m[r][c])
        if piv == 0:
            return mp.mpc(0)
        if piv_r != i:
            m[i], m[piv_r] = m[piv_r], m[i]
            det = -det
        if piv_c != i:
            for r in range(k):
                m[r][i], m[r][piv_c] = m[r][piv_c], m[r][i]
            det = -det
        det *= m[i][i]
        inv = 1 / m[i][i]
        for r in range(i + 1, k):
            f = m[r][i] * inv
            if f == 0:
                continue
            for c in range(i, k):
                m[r][c] -= f * m[i][c]
    return det


def hankel_ratio_oracle(tbl: MomentTable, n: int, ctx: PrecisionContext):
    """(a_n, b_n) through Hankel determinant ratios; an independent check.

    D_k = det[mu_{i+j}], a_n = D_{n+1} D_{n-1} / D_n^2,
    b_n = Delta_{n+1}/D_{n+1} - Delta_n/D_n with Delta_k the same
    determinant whose last column indices are shifted up by one.
    """
    mu = tbl.values
    if len(mu) < 2 * n + 2:
        raise ValueError(f"need mu_0..mu_{2 * n + 1}, have {len(mu)}")
    with ctx.workprec():
        def d_k(k, shifted=False):
            if k == 0:
                return mp.mpc(1)
            rows = []
            for i in range(k):
                row = [mu[i + j] for j in range(k)]
                if shifted:
                    row[-1] = mu[i + k]
                rows.append(row)
            return _det_full_pivot(rows, ctx)

        dn1, dn, dnp = d_k(n - 1), d_k(n), d_k(n + 1)
        for k, v in ((n - 1, dn1), (n, dn), (n + 1, dnp)):
            if v == 0:
                raise ExistenceFailure(k, f"D_{k} = 0")
        a_n = dnp * dn1 / (dn * dn)
        b_n = d_k(n + 1, shifted=True) / dnp - d_k(n, shifted=True) / dn
        return a_n, b_n


def laguerre_exact(p: ModelParams, n: int = None):
    """Exact (a_n, b_n) for b = 0: a_n = n nu / N^2, b_n = (n + nu + 1)/N."""
    if mp.mpf(p.b) != 0:
        raise RequiresBZero(f"closed Laguerre form needs b = 0, got b = {p.b}")
    if n is None:
        n = p.n
    nu = mp.mpf(p.nu)
    N = p.N
    return n * nu / (N * N), (n + nu + 1) / N


def poly_coeffs(rt: RecurrenceTable, n: int):
    """Monic coefficients of pi_n (ascending order) from the recurrence."""
    if n > len(rt.a):
        raise ValueError(f"recurrence table holds {len(rt.a)} coefficients, need {n}")
    pm1 = [mp.mpc(1)]            # pi_0
    if n == 0:
        return pm1
    cur = [-rt.b[0], mp.mpc(1)]  # pi_1
    for k in range(1, n):
        nxt = [mp.mpc(0)] * (k + 2)
        for i, c in enumerate(cur):
            nxt[i + 1] += c
            nxt[i] -= rt.b[k] * c
        for i, c in enumerate(pm1):
            nxt[i] -= rt.a[k - 1] * c
        pm1, cur = cur, nxt
    return cur


def _horner(coeffs, z):
    acc = mp.mpc(0)
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def zeros(coeffs, ctx: PrecisionContext, max_iter: int = None) -> ZeroSet:
    """All roots by Aberth-Ehrlich simultaneous iteration.

    Starting points sit on the unit circle about the root centroid; the
    sweep is synchronous (Jacobi style) for run-to-run determinism.
    """
    n = len(coeffs) - 1
    if n < 1 or coeffs[-1] == 0:
        raise ValueError("need a monic polynomial of degree >= 1")
    if max_iter is None:
        max_iter = 200 + 30 * n
    with ctx.workprec():
        cs = [mp.mpc(c) / coeffs[-1] for c in coeffs]
        dcs = [cs[i] * i for i in range(1, n + 1)]
        centroid = -cs[-2] / n
        zs = [centroid + mp.exp(mp.mpc(0, 2 * mp.pi * (k + mp.mpf(1) / 3) / n))
              for k in range(n)]
        # quadratic convergence: a half-precision step bound already puts
        # the roots far below it
        tol = mp.mpf(2) ** (-(ctx.bits // 2))
        for _ in range(max_iter):
            new = []
            moved = mp.mpf(0)
            for k, zk in enumerate(zs):
                pv = _horner(cs, zk)
                dv = _horner(dcs, zk)
                if dv == 0:
                    new.append(zk + tol)
                    moved = max(moved, tol)
                    continue
                ratio = pv / dv
                s = mp.mpc(0)
                for j, zj in enumerate(zs):
                    if j != k and zk != zj:
                        s += 1 / (zk - zj)
                denom = 1 - ratio * s
                step = ratio / denom if denom != 0 else ratio
                new.append(zk - step)
                moved = max(moved, abs(step))
            zs = new
            if moved <= tol * max(1, max(abs(z) for z in zs)):
                break
        else:
            raise NoConvergence("Aberth iteration did not settle")
        coeff_scale = max(abs(c) for c in cs)
        resid = max(abs(_horner(cs, z)) for z in zs)
        return ZeroSet(degree=n, zeros=zs, max_residual=resid / coeff_scale)
