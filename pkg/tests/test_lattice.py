import random

import mpmath
import pytest

from torsionlab.errors import BranchJump, DegenerateCurve, PointNotOnCurve, PoleProximity
from torsionlab.lattice import (
    Lattice,
    LogContinuation,
    betti_e,
    elog,
    from_short,
    periods,
    wlogsigma,
    wp,
    wsigma,
    wzeta,
)
from torsionlab.exactalg import rational_recognize


@pytest.fixture(autouse=True)
def _dps():
    with mpmath.workdps(50):
        yield


@pytest.fixture
def lem():
    return periods(4, 0, 50)


def _rand_z(rng):
    return mpmath.mpc(rng.uniform(-2, 2), rng.uniform(-2, 2))


def test_lemniscatic_periods(lem):
    # quadrature oracle: 2 * int_1^oo dx / sqrt(4x^3 - 4x)
    with mpmath.workdps(30):
        quad = 2 * mpmath.quad(lambda x: 1 / mpmath.sqrt(4 * x**3 - 4 * x), [1, 2, mpmath.inf])
    assert abs(lem.omega1 - quad) < 1e-12
    # refined: the lemniscate constant Gamma(1/4)^2 / (2 sqrt(2 pi))
    exact = mpmath.gamma(mpmath.mpf(1) / 4) ** 2 / (2 * mpmath.sqrt(2 * mpmath.pi))
    assert abs(lem.omega1 - exact) < mpmath.mpf(10) ** -45
    assert abs(lem.tau - 1j) < mpmath.mpf(10) ** -45
    assert abs(lem.eta1 * lem.omega1 - mpmath.pi) < mpmath.mpf(10) ** -45


def test_scaling_law(lem):
    c = mpmath.mpf(3) / 2
    L2 = periods(4 * c**4, 0, 50)
    assert abs(L2.omega1 - lem.omega1 / c) < mpmath.mpf(10) ** -40


def test_degenerate():
    with pytest.raises(DegenerateCurve):
        periods(0, 0, 50)
    with pytest.raises(DegenerateCurve):
        periods(3, 1, 50)  # 27 - 27


def test_legendre_random():
    rng = random.Random(0x5EED)
    for _ in range(5):
        g2 = mpmath.mpc(rng.uniform(-10, 10), rng.uniform(-10, 10))
        g3 = mpmath.mpc(rng.uniform(-10, 10), rng.uniform(-10, 10))
        L = periods(g2, g3, 50)
        assert L.legendre_residual() < mpmath.mpf(10) ** -40
        assert mpmath.im(L.tau) > 0
        assert abs(mpmath.re(L.tau)) <= 0.5 + 1e-30 and abs(L.tau) >= 1 - 1e-30


def test_wp_examples(lem):
    p, dp = wp(lem, lem.omega1 / 2)
    assert min(abs(p - e) for e in lem.roots) < mpmath.mpf(10) ** -40
    assert abs(dp) < mpmath.mpf(10) ** -40
    z = mpmath.mpc("0.3", "0.7")
    assert abs(wp(lem, -z)[0] - wp(lem, z)[0]) < mpmath.mpf(10) ** -40
    # duplication from omega1/4 gives omega1/2: wp(2z) = (wp''(z)/(2 wp'(z)))^2 - 2 wp(z)
    p4, dp4 = wp(lem, lem.omega1 / 4)
    ddp = 6 * p4**2 - lem.g2 / 2
    assert abs((ddp / (2 * dp4)) ** 2 - 2 * p4 - p) < mpmath.mpf(10) ** -40
    with pytest.raises(PoleProximity):
        wp(lem, lem.omega2)


def test_ode_residual():
    rng = random.Random(3)
    for L in (periods(4, 0, 50), periods(mpmath.mpc(2, 1), mpmath.mpc(-1, 3), 50)):
        for _ in range(20):
            p, dp = wp(L, _rand_z(rng))
            assert abs(dp**2 - (4 * p**3 - L.g2 * p - L.g3)) < mpmath.mpf(10) ** -38 * max(1, abs(p) ** 3)


def test_zeta_sigma(lem):
    z = mpmath.mpc("0.41", "-0.23")
    assert abs(wzeta(lem, -z) + wzeta(lem, z)) < mpmath.mpf(10) ** -40
    assert abs(wsigma(lem, -z) + wsigma(lem, z)) < mpmath.mpf(10) ** -40
    assert abs(wzeta(lem, lem.omega1 / 2) - lem.eta1 / 2) < mpmath.mpf(10) ** -40
    for w, eta in ((lem.omega1, lem.eta1), (lem.omega2, lem.eta2)):
        assert abs(wzeta(lem, z + w) - wzeta(lem, z) - eta) < mpmath.mpf(10) ** -38
        lhs = wsigma(lem, z + w)
        rhs = -wsigma(lem, z) * mpmath.exp(eta * (z + w / 2))
        assert abs(lhs - rhs) < mpmath.mpf(10) ** -38 * abs(rhs)


def test_dlogsigma_is_zeta():
    L = periods(mpmath.mpc(1, 2), mpmath.mpc(3, -1), 50)
    rng = random.Random(11)
    h = mpmath.mpf(10) ** -20
    for _ in range(3):
        z = _rand_z(rng)
        fd = (wlogsigma(L, z + h) - wlogsigma(L, z - h)) / (2 * h)
        assert abs(fd - wzeta(L, z)) < mpmath.mpf(10) ** -25


def test_zeta_addition():
    L = periods(mpmath.mpc(1, 2), mpmath.mpc(3, -1), 50)
    rng = random.Random(5)
    for _ in range(5):
        u, v = _rand_z(rng), _rand_z(rng)
        pu, dpu = wp(L, u)
        pv, dpv = wp(L, v)
        lhs = wzeta(L, u + v) - wzeta(L, u) - wzeta(L, v)
        rhs = (dpu - dpv) / (pu - pv) / 2
        assert abs(lhs - rhs) < mpmath.mpf(10) ** -38 * max(1, abs(rhs))


def test_elog_examples(lem):
    assert elog(lem, None) == 0
    e = lem.roots[-1]
    z = elog(lem, (e, 0))
    assert min(abs(z - w / 2) for w in (lem.omega1, lem.omega2, lem.omega1 + lem.omega2)) < mpmath.mpf(10) ** -35
    with pytest.raises(PointNotOnCurve):
        elog(lem, (1, 1))


def test_elog_roundtrip():
    rng = random.Random(9)
    for L in (periods(4, 0, 50), periods(mpmath.mpc(-3, 1), mpmath.mpc(2, 2), 50)):
        for _ in range(10):
            z = _rand_z(rng)
            P = wp(L, z)
            back = wp(L, elog(L, P))
            assert abs(back[0] - P[0]) + abs(back[1] - P[1]) < mpmath.mpf(10) ** -38 * max(1, abs(P[1]))


def test_betti_examples(lem):
    b = betti_e(lem, lem.omega1 / 2)
    assert abs(b.b1 - 0.5) < 1e-45 and abs(b.b2) < 1e-45
    b = betti_e(lem, (lem.omega1 + lem.omega2) / 2)
    assert abs(b.b1 - 0.5) < 1e-45 and abs(b.b2 - 0.5) < 1e-45


def test_betti_of_order_three_point():
    # family point p = (0, -1) on Y^2 = X^3 + 1 (lam = 0) has order 3
    L = from_short(0, 1, 50)
    u = elog(L, (0, -2))
    b = betti_e(L, u)
    tol = mpmath.mpf(10) ** -30
    assert rational_recognize(b.b1, 3, tol) is not None
    assert rational_recognize(b.b2, 3, tol) is not None


def test_picard_painleve_check():
    # family y^2 = 4x^3 - lam x + 1/16 with p = (0, -1/4): Betti coordinates move with lam
    out = []
    for lam in (mpmath.mpf(1) / 4, mpmath.mpf(1) / 2):
        L = periods(lam, -mpmath.mpf(1) / 16, 50)
        b = betti_e(L, elog(L, (0, -mpmath.mpf(1) / 4)))
        out.append((b.b1, b.b2))
    assert max(abs(out[0][0] - out[1][0]), abs(out[0][1] - out[1][1])) > 1e-6


def test_json_roundtrip(lem):
    L2 = Lattice.from_dict(lem.to_dict())
    assert abs(L2.omega1 - lem.omega1) < mpmath.mpf(10) ** -45
    assert abs(L2.eta2 - lem.eta2) < mpmath.mpf(10) ** -45


def test_continuation(lem):
    cont = LogContinuation()
    z0 = mpmath.mpc("0.2", "0.1")
    assert cont.step(z0, lem) == z0
    # same point shifted by a period is pulled back next to the previous value
    assert abs(cont.step(z0 + 0.01 + lem.omega1, lem) - (z0 + 0.01)) < 1e-40
    with pytest.raises(BranchJump):
        cont.step(z0 + lem.omega1 / 2, lem)
