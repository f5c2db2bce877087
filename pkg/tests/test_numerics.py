import mpmath as mp
import pytest

from modlag.errors import PoleOfGamma
from modlag.numerics import (
    PathSegment,
    PrecisionContext,
    gamma,
    gauss_legendre_nodes,
    integrate_path,
    pairwise_sum,
    with_escalating_precision,
)


def test_context_invariants():
    ctx = PrecisionContext(bits=128)
    assert ctx.dps > 30
    with pytest.raises(ValueError):
        PrecisionContext(bits=32)
    with pytest.raises(ValueError):
        PrecisionContext(bits=128, guard_bits=8)


def test_workprec_restores_ambient():
    before = mp.mp.prec
    ctx = PrecisionContext(bits=300)
    with ctx.workprec():
        assert mp.mp.prec >= 300
    assert mp.mp.prec == before


def test_gamma_against_factorials():
    ctx = PrecisionContext(bits=192)
    with ctx.workprec():
        for k in range(1, 12):
            assert abs(gamma(k, ctx) - mp.factorial(k - 1)) < mp.mpf(10) ** -40


def test_gamma_reflection_and_poles():
    ctx = PrecisionContext(bits=192)
    with ctx.workprec():
        v = gamma(mp.mpf(1) / 2, ctx)
        assert abs(v - mp.sqrt(mp.pi)) < mp.mpf(10) ** -50
        z = mp.mpc(-2.3, 0.7)
        assert abs(gamma(z, ctx) - mp.gamma(z)) / abs(mp.gamma(z)) < mp.mpf(10) ** -40
    with pytest.raises(PoleOfGamma):
        gamma(-3, ctx)


def test_gauss_legendre_nodes_integrate_cubic():
    xs, ws = gauss_legendre_nodes(8, 128)
    acc = sum(w * (x ** 3 + x * x) for x, w in zip(xs, ws))
    assert abs(acc - mp.mpf(2) / 3) < mp.mpf(10) ** -30


def test_integrate_path_residue():
    ctx = PrecisionContext(bits=160)
    with ctx.workprec():
        loop = [PathSegment.circular_arc(0, 1, 0, 2 * mp.pi)]
        val, err = integrate_path(lambda z: 1 / z, loop, ctx)
        assert abs(val - 2 * mp.pi * mp.mpc(0, 1)) < mp.mpf(10) ** -40
        assert err < mp.mpf(10) ** -30


def test_integrate_path_line_exp():
    ctx = PrecisionContext(bits=160)
    with ctx.workprec():
        seg = [PathSegment.line(0, mp.mpc(1, 1))]
        val, _ = integrate_path(mp.exp, seg, ctx)
        assert abs(val - (mp.exp(mp.mpc(1, 1)) - 1)) < mp.mpf(10) ** -40


def test_pairwise_sum_matches_fsum():
    xs = [mp.mpf(k) / 7 for k in range(101)]
    assert abs(pairwise_sum(xs) - sum(xs)) < mp.mpf(10) ** -20


def test_escalating_precision_converges():
    def compute(ctx):
        with ctx.workprec():
            return mp.exp(mp.mpf(1))

    val, bits = with_escalating_precision(compute, PrecisionContext(bits=64), max_bits=512)
    assert abs(val - mp.e) < mp.mpf(10) ** -15
