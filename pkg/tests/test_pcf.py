import random

import mpmath as mp

from modlag.numerics import PrecisionContext
from modlag.pcf import pcf_d, pcf_d_prime, pcf_real_zeros, pcf_wronskian

CTX = PrecisionContext(bits=192)


def _ref(nu, z):
    # independent reference; mpmath's pcfd needs generous headroom to
    # absorb the e^{Re(z^2)/2} series cancellation at larger |z|
    old = mp.mp.prec
    mp.mp.prec = 1200
    try:
        return mp.pcfd(nu, z)
    finally:
        mp.mp.prec = old


def test_known_small_values():
    with CTX.workprec():
        # D_0(z) = e^{-z^2/4}
        for z in (mp.mpf("0.3"), mp.mpc(1, 2), mp.mpc(-4, 1)):
            v = pcf_d(0, z, CTX)
            assert abs(v - mp.exp(-z * z / 4)) < mp.mpf(10) ** -40
        # D_1(z) = z e^{-z^2/4}
        v = pcf_d(1, mp.mpf(2), CTX)
        assert abs(v - 2 * mp.exp(-1)) < mp.mpf(10) ** -40


def test_random_points_match_reference():
    rng = random.Random(42)
    with CTX.workprec():
        for _ in range(25):
            nu = mp.mpf(rng.uniform(-3, 4))
            r = rng.uniform(0.2, 35)
            th = rng.uniform(-3.14, 3.14)
            z = r * mp.exp(mp.mpc(0, 1) * mp.mpf(th))
            v = pcf_d(nu, z, CTX)
            ref = _ref(nu, z)
            assert abs(v - ref) <= mp.mpf(10) ** -40 * max(abs(ref), mp.mpf(10) ** -30)


def test_recurrence_identity():
    # D_{nu+1}(z) - z D_nu(z) + nu D_{nu-1}(z) = 0
    rng = random.Random(5)
    with CTX.workprec():
        for _ in range(10):
            nu = mp.mpf(rng.uniform(-2, 3))
            z = mp.mpc(rng.uniform(-6, 6), rng.uniform(-6, 6))
            lhs = pcf_d(nu + 1, z, CTX) - z * pcf_d(nu, z, CTX) + nu * pcf_d(nu - 1, z, CTX)
            scale = max(abs(pcf_d(nu, z, CTX)), 1)
            assert abs(lhs) < mp.mpf(10) ** -40 * scale


def test_derivative_ladder():
    with CTX.workprec():
        nu = mp.mpf("0.73")
        z = mp.mpc("1.1", "-0.4")
        d = pcf_d_prime(nu, z, CTX)
        h = mp.mpf(10) ** -25
        fd = (_ref(nu, z + h) - _ref(nu, z - h)) / (2 * h)
        assert abs(d - fd) / abs(fd) < mp.mpf(10) ** -20


def test_weber_equation_residual():
    # y'' + (nu + 1/2 - z^2/4) y = 0 via the ladder for both derivatives
    with CTX.workprec():
        nu = mp.mpf("1.37")
        z = mp.mpc("0.8", "0.5")
        y = pcf_d(nu, z, CTX)
        yp = pcf_d_prime(nu, z, CTX)
        # y'' from differentiating the ladder identity
        ypp = -(y + z * yp) / 2 + nu * pcf_d_prime(nu - 1, z, CTX)
        res = ypp + (nu + mp.mpf(1) / 2 - z * z / 4) * y
        assert abs(res) < mp.mpf(10) ** -40 * max(1, abs(y))


def test_wronskian_recurrence_identity():
    # With the ladder D'_mu = -(z/2) D_mu + mu D_{mu-1} and the
    # three-term recurrence, the cross terms collapse:
    # W(D_{nu-1}, D_nu) = nu D_{nu-1}^2 - (nu-1) D_{nu-2} D_nu.
    with CTX.workprec():
        rt2 = mp.sqrt(2)
        for nu, s in ((mp.mpf("0.6"), mp.mpf("0.3")),
                      (mp.mpf("-1.3"), mp.mpf("-0.8"))):
            z = rt2 * s
            w = pcf_wronskian(nu, s, CTX)
            expect = rt2 * (nu * pcf_d(nu - 1, z, CTX) ** 2
                            - (nu - 1) * pcf_d(nu - 2, z, CTX) * pcf_d(nu, z, CTX))
            assert abs(w - expect) < mp.mpf(10) ** -38 * max(1, abs(expect))


def test_real_zero_count_and_residual():
    # D_nu has max(ceil(nu), 0) real zeros
    with CTX.workprec():
        for nu, expected in ((2.5, 3), (1.2, 2), (-0.7, 0)):
            zs = pcf_real_zeros(nu, (-6, 6), CTX, grid=400)
            assert len(zs) == expected
            for s in zs:
                assert abs(pcf_d(nu, mp.sqrt(2) * s, CTX)) < mp.mpf(10) ** -30
