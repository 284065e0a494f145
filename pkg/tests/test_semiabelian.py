import random

import mpmath
import pytest

from torsionlab.errors import AlphaParity, NotCM, PoleProximity, TorsionZeroQ
from torsionlab.lattice import periods, wp
from torsionlab.semiabelian import (
    GLog,
    GPoint,
    betti_g,
    cm_data,
    extension_make,
    g_exp,
    g_log,
    g_multiply,
    g_torsion_test,
    green,
    primitive_torsion,
    ribet_betti_closed,
    ribet_betti_ray,
    ribet_delta,
    ribet_order_check,
    s2_value,
    theta_identity_residual,
)


@pytest.fixture(autouse=True)
def _dps():
    with mpmath.workdps(50):
        yield


@pytest.fixture
def lem():
    return periods(4, 0, 50)


@pytest.fixture
def gen_lattice():
    return periods(mpmath.mpc(2, 1), mpmath.mpc(-1, 3), 50)


def _close(a, b, k=38):
    return abs(a - b) < mpmath.mpf(10) ** -k * max(1, abs(b))


def test_extension_examples(gen_lattice):
    L = gen_lattice
    ext = extension_make(L, mpmath.mpc("0.3", "0.2"))
    assert _close(ext.kappa(1, 1), ext.kappa1 + ext.kappa2)
    ext3 = extension_make(L, L.omega2 / 3)
    assert ext3.kappa2 is not None
    with pytest.raises(TorsionZeroQ):
        extension_make(L, 0)


def test_green(gen_lattice):
    L = gen_lattice
    u, v = mpmath.mpc("0.3", "0.1"), mpmath.mpc("-0.2", "0.45")
    assert _close(mpmath.exp(green(L, u, v)), mpmath.exp(green(L, v, u)))
    with pytest.raises(PoleProximity):
        green(L, u, -u)


def test_g_exp_periods(gen_lattice):
    L = gen_lattice
    rng = random.Random(1)
    ext = extension_make(L, mpmath.mpc("0.37", "-0.21"))
    for _ in range(20):
        t = mpmath.mpc(rng.uniform(-1, 1), rng.uniform(-1, 1))
        z = mpmath.mpc(rng.uniform(-1, 1), rng.uniform(-1, 1))
        base = g_exp(ext, t, z)
        for dt, dz in (ext.vpi0, ext.vpi1, ext.vpi2):
            s = g_exp(ext, t + dt, z + dz)
            assert abs(s.delta - base.delta) < mpmath.mpf(10) ** -35 * abs(base.delta)
            assert _close(s.epoint[0], base.epoint[0], 35)


def test_cocycle_matches_exp(gen_lattice):
    L = gen_lattice
    ext = extension_make(L, mpmath.mpc("0.37", "-0.21"))
    t1, z1 = mpmath.mpc("0.2", "0.3"), mpmath.mpc("0.15", "0.4")
    t2, z2 = mpmath.mpc("-0.4", "0.1"), mpmath.mpc("0.5", "-0.3")
    prod = g_multiply(ext, g_exp(ext, t1, z1), z1, g_exp(ext, t2, z2), z2)
    direct = g_exp(ext, t1 + t2, z1 + z2)
    assert _close(prod.delta, direct.delta)
    assert _close(prod.epoint[0], direct.epoint[0])


def test_log_roundtrip(gen_lattice):
    L = gen_lattice
    ext = extension_make(L, mpmath.mpc("0.37", "-0.21"))
    rng = random.Random(2)
    for _ in range(20):
        t = mpmath.mpc(rng.uniform(-1, 1), rng.uniform(-1, 1))
        z = mpmath.mpc(rng.uniform(-1, 1), rng.uniform(-1, 1))
        s = g_exp(ext, t, z)
        U = g_log(ext, s)
        back = g_exp(ext, U.t, U.z)
        assert abs(back.delta - s.delta) < mpmath.mpf(10) ** -38 * abs(s.delta)
        # same point of Lie G modulo periods: Betti coordinates differ by integers
        d = betti_g(ext, GLog(U.t - t, U.z - z))
        for x in (mpmath.re(d.a), d.b1, d.b2):
            assert abs(x - mpmath.nint(x)) < 1e-35
        assert abs(mpmath.im(d.a)) < 1e-35


def test_log_formula_and_branch(gen_lattice):
    L = gen_lattice
    ext = extension_make(L, mpmath.mpc("0.37", "-0.21"))
    u = mpmath.mpc("0.3", "0.25")
    s = GPoint(mpmath.mpc(1), wp(L, u))
    U = g_log(ext, s, u)
    assert _close(U.t, -green(L, u, ext.v) + ext.zeta_v * u)
    s2 = GPoint(mpmath.mpc(-1), wp(L, u))
    assert abs(g_log(ext, s2, u).t - U.t - 1j * mpmath.pi) < 1e-40


def test_betti_examples(gen_lattice):
    L = gen_lattice
    ext = extension_make(L, mpmath.mpc("0.37", "-0.21"))
    B = betti_g(ext, GLog(*ext.vpi1))
    assert abs(B.a) < 1e-40 and abs(B.b1 - 1) < 1e-40 and abs(B.b2) < 1e-40
    B = betti_g(ext, GLog(2j * mpmath.pi / 5, 0))
    assert abs(B.a - mpmath.mpf(1) / 5) < 1e-40


def test_torsion_test(gen_lattice):
    L = gen_lattice
    ext = extension_make(L, mpmath.mpc("0.37", "-0.21"))
    # (1/2, 1/3, 0) in the period basis: order 6
    t = 1j * mpmath.pi + ext.kappa1 / 3
    z = L.omega1 / 3
    s = g_exp(ext, t, z)
    assert g_torsion_test(ext, s, z, 50) == 6
    rng = random.Random(4)
    zr = mpmath.mpc(rng.random(), rng.random())
    assert g_torsion_test(ext, g_exp(ext, mpmath.mpc(0.123, 0.456), zr), zr, 50) is None


def test_s2(lem):
    data = cm_data(lem)
    assert data.quadratic == (1, 0, 1)
    assert abs(s2_value(lem)) < mpmath.mpf(10) ** -40
    L60 = periods(4, 0, 60)
    assert cm_data(L60).residual < mpmath.mpf(10) ** -40
    with pytest.raises(NotCM):
        s2_value(periods(4, 1, 50))


def test_s2_nonzero_cm():
    # j = 0 curve (g2 = 0): tau = exp(2 pi i / 3), CM by Z[zeta_3]
    L = periods(0, 4, 50)
    d = cm_data(L)
    assert d.quadratic == (1, 1, 1)
    assert d.residual < mpmath.mpf(10) ** -40


def test_ribet_delta(lem):
    u = mpmath.mpc("0.31", "0.17")
    rv = ribet_delta(lem, 2j, u)
    # sigma is odd, so delta(-u) = -delta(u)
    assert abs(ribet_delta(lem, 2j, -u).delta + rv.delta) < 1e-40
    with pytest.raises(AlphaParity):
        ribet_delta(lem, 1j, u)
    # the Ribet log agrees with the general log formula (mod 2 pi i)
    ext = extension_make(lem, rv.v)
    U = g_log(ext, GPoint(rv.delta, wp(lem, u)), u)
    d = (U.t - rv.log_t) / (2j * mpmath.pi)
    assert abs(d - mpmath.nint(mpmath.re(d))) < 1e-38


def test_theta_identity():
    L = periods(4, 0, 60)
    with mpmath.workdps(60):
        for z in (mpmath.mpc("0.3", "0.17"), mpmath.mpc("1.1", "-0.4"), mpmath.mpc("-0.2", "0.9")):
            assert theta_identity_residual(L, 2j, z) < mpmath.mpf(10) ** -30


def test_ribet_order_examples(lem):
    assert ribet_order_check(lem, 2j, 1, 0, 3).m == 9
    r4 = ribet_order_check(lem, 2j, 1, 0, 4)
    assert r4.divides_n2 and r4.m == 16
    with pytest.raises(ValueError):
        ribet_order_check(lem, 2j, 0, 0, 1)


def test_closed_form_sign(lem):
    # a = +1/n^2 at u = omega1/n: alpha/(tau - conj(tau)) / n^2 with alpha = 2i, tau = i
    B = ribet_betti_closed(lem, 2j, mpmath.mpf(1) / 3, 0)
    assert abs(B.a - mpmath.mpf(1) / 9) < 1e-40


def test_ray_limit_matches_closed_form(lem):
    a, spread = ribet_betti_ray(lem, 2j, mpmath.mpf(1) / 2, 0)
    assert abs(a - mpmath.mpf(1) / 4) < 1e-10 and spread < 1e-10


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_ribet_law_all_primitive(lem, n):
    for k1, k2 in primitive_torsion(n):
        r = ribet_order_check(lem, 2j, k1, k2, n)
        assert r.divides_n2
        assert r.full_agrees in (True, None)


def test_two_pi_i_multiple_rationality(lem):
    # alpha in Z + 2 Z tau purely imaginary: alpha/(tau - conj(tau)) is an integer
    tau = lem.tau
    for b in (1, 2, -3):
        alpha = 2 * b * tau
        q = alpha / (tau - mpmath.conj(tau))
        assert abs(q - mpmath.nint(mpmath.re(q))) < 1e-40
