"""Weight evaluation, contour moments, Szego-curve geometry, level-curve trace."""

import random

import mpmath as mp
import pytest

from modlag.errors import ExcludedNu, UnsupportedClosedForm
from modlag.numerics import PrecisionContext
from modlag.weight_moments import (
    ContourSpec,
    ModelParams,
    beta_points,
    default_contour,
    gamma0_trace,
    moments,
    phi_n,
    szego_curve_points,
    szego_distance,
    szego_membership,
    weight_eval,
)

CTX = PrecisionContext(bits=192)


def test_model_params_derived_quantities():
    p = ModelParams(nu=0.5, b=0.0, L=0.2, n=16)
    with CTX.workprec():
        assert p.alpha == -16 + mp.mpf(0.5)
        assert abs(p.N - (16 + mp.sqrt(2) * mp.mpf(0.2) * 4)) < mp.mpf(10) ** -50
        assert abs(p.t * 16 - p.N) < mp.mpf(10) ** -50
        assert abs(p.A_n - (1 - mp.mpf(0.5) / 16)) < mp.mpf(10) ** -50


def test_excluded_nu():
    with pytest.raises(ExcludedNu):
        ModelParams(nu=1.0, b=0.0, L=0.1, n=4)
    ModelParams(nu=-1.0, b=0.0, L=0.1, n=4)  # negative integers are allowed


def test_weight_branch_cut_and_values():
    p = ModelParams(nu=0.5, b=0.5, L=0.1, n=3)
    with CTX.workprec():
        # just above/below the positive axis the z^alpha branch differs by
        # the phase e^{2 pi i alpha} and (z-1)^{2b} by e^{2 pi i (2b)}
        eps = mp.mpf(10) ** -30
        wu = weight_eval(mp.mpc(2, eps), p, CTX)
        wl = weight_eval(mp.mpc(2, -eps), p, CTX)
        ratio = wl / wu
        expect = mp.expjpi(2 * (p.alpha + 2 * mp.mpf(p.b)))
        assert abs(ratio - expect) < mp.mpf(10) ** -25
        # on the negative axis the weight is single-valued
        wm = weight_eval(mp.mpf(-1), p, CTX)
        assert abs(wm) > 0


def test_contour_spec_validation():
    with pytest.raises(ValueError):
        ContourSpec(rho=0.3, eps=0.4, R=5.0)
    with pytest.raises(ValueError):
        ContourSpec(rho=0.5, eps=0.2, R=1.0)
    seg = ContourSpec(rho=0.5, eps=0.2, R=5.0).segments()
    assert len(seg) == 3
    with CTX.workprec():
        # lower ray flows inward, upper ray outward
        assert mp.re(seg[0].start()) > mp.re(seg[0].end())
        assert mp.re(seg[2].end()) > mp.re(seg[2].start())


def test_closed_form_requires_integer_2b():
    p = ModelParams(nu=0.5, b=0.3, L=0.1, n=3)
    with pytest.raises(UnsupportedClosedForm):
        moments(p, 2, CTX, method="closed_form")


def test_moment_methods_agree():
    rng = random.Random(5)
    for _ in range(3):
        n = rng.randint(2, 8)
        p = ModelParams(nu=rng.uniform(0.1, 0.9), b=rng.choice([0.0, 0.5, 1.0]),
                        L=rng.uniform(-0.3, 0.3), n=n)
        with CTX.workprec():
            t_cf = moments(p, n, CTX, method="closed_form")
            t_q = moments(p, n, CTX, method="quadrature")
            tol = mp.mpf(2) ** (-(CTX.bits - 2 * CTX.guard_bits))
            for a, b in zip(t_cf.values, t_q.values):
                assert abs(a - b) <= tol * max(1, abs(a))


def test_moment_cache_roundtrip(tmp_path):
    p = ModelParams(nu=0.3, b=0.5, L=0.1, n=3)
    with CTX.workprec():
        t1 = moments(p, 3, CTX, method="closed_form", cache_dir=str(tmp_path))
        t2 = moments(p, 3, CTX, method="closed_form", cache_dir=str(tmp_path))
        assert len(list(tmp_path.iterdir())) == 1
        for a, b in zip(t1.values, t2.values):
            assert a == b


def test_szego_curve_membership():
    with CTX.workprec():
        pts = szego_curve_points(128, CTX)
        assert len(pts) in (128, 129)
        for z in pts:
            assert abs(szego_membership(z)) < mp.mpf(10) ** -10
        # 1 lies on the curve, 0 does not (it is the cusp limit point's chord)
        assert abs(szego_membership(mp.mpf(1))) == 0
        assert abs(szego_distance(mp.mpf(1), CTX)) < mp.mpf(10) ** -8
        d_half = szego_distance(mp.mpf("0.5"), CTX)
        assert mp.mpf("0.05") < d_half < mp.mpf("0.5")


def test_beta_points_cases():
    # Case I (nu > 0): real pair around A_n; Case II (nu < 0): conjugate pair
    p1 = ModelParams(nu=0.64, b=0.0, L=0.0, n=25)
    with CTX.workprec():
        bp = beta_points(p1)
        assert isinstance(bp, tuple) and len(bp) == 2
        b1, b2 = bp
        assert mp.im(b1) == 0 and mp.im(b2) == 0 and b1 < b2
        assert abs((b1 + b2) / 2 - (1 + mp.mpf(0.64) / 25)) < mp.mpf(10) ** -40
        p2 = ModelParams(nu=-0.8, b=0.0, L=0.0, n=25)
        bq = beta_points(p2)
        assert not isinstance(bq, tuple)
        assert mp.im(bq) > 0


def test_phi_vanishes_at_beta():
    with CTX.workprec():
        p = ModelParams(nu=0.64, b=0.0, L=0.0, n=25)
        b1, _ = beta_points(p)
        assert abs(phi_n(b1, p, CTX)) < mp.mpf(10) ** -40
        q = ModelParams(nu=-0.8, b=0.0, L=0.0, n=25)
        bq = beta_points(q)
        assert abs(phi_n(bq, q, CTX)) < mp.mpf(10) ** -40


def test_gamma0_trace_case1_closed_loop():
    with CTX.workprec():
        p = ModelParams(nu=0.64, b=0.0, L=0.0, n=25)
        poly = gamma0_trace(p, 0.1, CTX)
        assert abs(poly[0] - poly[-1]) < mp.mpf(10) ** -30  # closed
        # winding number about the origin equals one
        w = sum(mp.arg(poly[k + 1] / poly[k]) for k in range(len(poly) - 1))
        assert abs(w / (2 * mp.pi) - 1) < mp.mpf("0.01")


def test_gamma0_trace_case2_open_arc():
    with CTX.workprec():
        p = ModelParams(nu=-0.8, b=0.0, L=0.0, n=25)
        poly = gamma0_trace(p, 0.1, CTX)
        b = beta_points(p)
        ends = sorted((poly[0], poly[-1]), key=mp.im)
        assert abs(ends[1] - b) < mp.mpf("0.15")
        assert abs(ends[0] - mp.conj(b)) < mp.mpf("0.15")
        assert min(mp.re(z) for z in poly) < 0  # passes through the negative axis


def test_default_contour_shape():
    p = ModelParams(nu=0.5, b=0.0, L=0.1, n=6)
    with CTX.workprec():
        c = default_contour(p, CTX)
        assert 0 < c.eps < c.rho < 1
        assert c.R > 1 + c.eps
