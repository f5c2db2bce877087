"""Recurrence coefficients: Chebyshev algorithm, Hankel oracle, zeros."""

import random

import mpmath as mp
import pytest

from modlag.errors import ExistenceFailure, RequiresBZero
from modlag.numerics import PrecisionContext
from modlag.ortho import (
    hankel_ratio_oracle,
    laguerre_exact,
    poly_coeffs,
    recurrence_from_moments,
    zeros,
)
from modlag.weight_moments import ModelParams, MomentTable, moments

CTX = PrecisionContext(bits=192)


def _pipeline(p, n, ctx):
    tbl = moments(p, 2 * n + 1, ctx, method="closed_form")
    return tbl, recurrence_from_moments(tbl, n, ctx)


def test_b0_matches_exact_laguerre():
    p = ModelParams(nu=0.5, b=0.0, L=0.2, n=10)
    with CTX.workprec():
        _, rt = _pipeline(p, 10, CTX)
        tol = mp.mpf(2) ** (-(CTX.bits - 3 * CTX.guard_bits))
        for k in range(1, 11):
            ak = k * (k + p.alpha) / p.N ** 2        # monic Laguerre, scaled
            bk = (2 * k + p.alpha + 1) / p.N
            assert abs(rt.a[k - 1] - ak) <= tol * max(1, abs(ak)), k
            assert abs(rt.b[k] - bk) <= tol * max(1, abs(bk)), k
        # the closed form at k = n specialises to nu*n/N^2, (n+nu+1)/N
        an, bn = laguerre_exact(p)
        assert abs(rt.a[9] - an) <= tol
        assert abs(rt.b[10] - bn) <= tol


def test_a_k_sign_pattern_b0():
    # a_k = k (k - n + nu)/N^2: negative for k < n - nu, positive above
    p = ModelParams(nu=0.5, b=0.0, L=0.1, n=8)
    with CTX.workprec():
        _, rt = _pipeline(p, 8, CTX)
        for k in range(1, 9):
            want = mp.sign(k - 8 + mp.mpf(0.5))
            assert mp.sign(mp.re(rt.a[k - 1])) == want, k
            assert abs(mp.im(rt.a[k - 1])) < mp.mpf(10) ** -40


def test_hankel_oracle_agrees_with_chebyshev():
    rng = random.Random(3)
    with CTX.workprec():
        for _ in range(3):
            n = rng.randint(3, 8)
            p = ModelParams(nu=rng.uniform(0.1, 0.9), b=rng.choice([0.0, 0.5, 1.0]),
                            L=rng.uniform(-0.3, 0.3), n=n)
            tbl, rt = _pipeline(p, n, CTX)
            a_o, b_o = hankel_ratio_oracle(tbl, n, CTX)
            tol = mp.mpf(2) ** (-CTX.bits // 2)
            assert abs(rt.a[n - 1] - a_o) <= tol * max(1, abs(a_o))
            assert abs(rt.b[n] - b_o) <= tol * max(1, abs(b_o))


def test_existence_failure_detected():
    p = ModelParams(nu=0.5, b=0.0, L=0.0, n=2)
    # mu_1 = mu_2 = 0 forces sigma_{1,1} = 0: pi_2 does not exist
    tbl = MomentTable(params=p, prec_bits=CTX.bits, method="synthetic",
                      values=[mp.mpc(1), mp.mpc(0), mp.mpc(0),
                              mp.mpc(1), mp.mpc(0), mp.mpc(0)])
    with pytest.raises(ExistenceFailure):
        recurrence_from_moments(tbl, 2, CTX)


def test_laguerre_exact_requires_b0():
    p = ModelParams(nu=0.5, b=0.5, L=0.1, n=4)
    with pytest.raises(RequiresBZero):
        laguerre_exact(p)


def test_poly_coeffs_satisfy_recurrence():
    p = ModelParams(nu=0.4, b=0.5, L=0.2, n=6)
    with CTX.workprec():
        tbl, rt = _pipeline(p, 6, CTX)
        c5 = poly_coeffs(rt, 5)
        c6 = poly_coeffs(rt, 6)
        c4 = poly_coeffs(rt, 4)
        # pi_6 = (z - b_5) pi_5 - a_5 pi_4 coefficient-wise
        expect = [mp.mpc(0)] * 7
        for i, c in enumerate(c5):
            expect[i + 1] += c
            expect[i] -= rt.b[5] * c
        for i, c in enumerate(c4):
            expect[i] -= rt.a[4] * c
        for got, want in zip(c6, expect):
            assert abs(got - want) < mp.mpf(10) ** -40 * max(1, abs(want))
        # orthogonality: sum_j c_j mu_{j+l} = 0 for l < 6
        for l in range(6):
            s = sum(c * tbl.values[j + l] for j, c in enumerate(c6))
            assert abs(s) < mp.mpf(10) ** -30 * max(abs(v) for v in tbl.values)


def test_zeros_solve_polynomial():
    p = ModelParams(nu=0.5, b=0.0, L=0.0, n=12)
    with CTX.workprec():
        _, rt = _pipeline(p, 12, CTX)
        coeffs = poly_coeffs(rt, 12)
        zs = zeros(coeffs, CTX)
        assert zs.degree == 12
        assert len(zs.zeros) == 12
        assert zs.max_residual < mp.mpf(2) ** (-CTX.bits // 3)
        # Vieta: the zero sum equals -c_{n-1}
        s = sum(zs.zeros)
        assert abs(s + coeffs[-2]) < mp.mpf(10) ** -30 * max(1, abs(coeffs[-2]))
