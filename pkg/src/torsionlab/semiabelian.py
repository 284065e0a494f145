"""Extensions G of an elliptic curve E by the multiplicative group.

For v = log_E(q) the extension is presented through the theta function
f_v(z) = sigma(v+z) / (sigma(v) sigma(z)) * exp(-zeta(v) z): exp_G(t, z) is the
point (f_v(z) e^t, wp(z)).  Since f_v(z + omega) = f_v(z) exp(-kappa_v(omega))
with kappa_v(omega) = zeta(v) omega - eta v, the kernel of exp_G is spanned by
(2 pi i, 0) and (kappa_v(omega_i), omega_i).

Sign convention: the multiplicative coordinate is measured against the
section whose divisor is (-q) - (0), as in the source formulas; flipping it
negates v throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import mpmath

from .errors import (
    AlphaNotAntisymmetric,
    AlphaParity,
    InternalCheckFailed,
    NotCM,
    PoleProximity,
    RecognitionFailed,
    TorsionZeroQ,
)
from .exactalg import rational_recognize
from .lattice import GUARD, Lattice, _c, betti_e, elog, wp, wsigma, wzeta


def _2pii():
    return 2j * mpmath.pi


def _near_lattice(L: Lattice, z) -> bool:
    bt = betti_e(L, z)
    m, n = mpmath.nint(bt.b1), mpmath.nint(bt.b2)
    return abs(z - m * L.omega1 - n * L.omega2) < mpmath.mpf(10) ** (-L.prec // 2) * abs(L.omega1)


@dataclass(frozen=True)
class GExtension:
    L: Lattice
    v: mpmath.mpc
    zeta_v: mpmath.mpc
    sigma_v: mpmath.mpc
    kappa1: mpmath.mpc
    kappa2: mpmath.mpc

    @property
    def vpi0(self):
        return (_2pii(), mpmath.mpc(0))

    @property
    def vpi1(self):
        return (self.kappa1, self.L.omega1)

    @property
    def vpi2(self):
        return (self.kappa2, self.L.omega2)

    def kappa(self, m: int, n: int):
        """kappa_v(m omega1 + n omega2)."""
        L = self.L
        return self.zeta_v * (m * L.omega1 + n * L.omega2) - (m * L.eta1 + n * L.eta2) * self.v

    def to_dict(self, digits: int = 30) -> dict:
        from .numfmt import fmt_complex

        return {"v": fmt_complex(self.v, digits), "kappa1": fmt_complex(self.kappa1, digits),
                "kappa2": fmt_complex(self.kappa2, digits), "lattice": self.L.to_dict()}


@dataclass(frozen=True)
class GPoint:
    delta: mpmath.mpc
    epoint: tuple | None  # (wp, wp') or None for the origin of E


@dataclass(frozen=True)
class GLog:
    t: mpmath.mpc
    z: mpmath.mpc


@dataclass(frozen=True)
class GBetti:
    a: mpmath.mpc
    b1: mpmath.mpf
    b2: mpmath.mpf
    prec: int = 50
    recognized: dict | None = None

    def to_dict(self, digits: int = 30) -> dict:
        from .numfmt import fmt_real

        return {
            "a_re": fmt_real(mpmath.re(self.a), digits),
            "a_im": fmt_real(mpmath.im(self.a), digits),
            "b1": fmt_real(self.b1, digits),
            "b2": fmt_real(self.b2, digits),
            "recognized": self.recognized,
            "prec": self.prec,
        }


def extension_make(L: Lattice, v) -> GExtension:
    with mpmath.workdps(L.prec + GUARD):
        v = _c(v)
        if _near_lattice(L, v):
            raise TorsionZeroQ("v lies in the period lattice", v=v)
        zv = wzeta(L, v)
        k1 = zv * L.omega1 - L.eta1 * v
        k2 = zv * L.omega2 - L.eta2 * v
        return GExtension(L, v, zv, wsigma(L, v), k1, k2)


def green(L: Lattice, u, v):
    """g(u, v) = log(sigma(u+v) / (sigma(u) sigma(v))), principal branch."""
    with mpmath.workdps(L.prec + GUARD):
        u, v = _c(u), _c(v)
        for z in (u, v, u + v):
            if _near_lattice(L, z):
                raise PoleProximity("u, v and u+v must avoid the lattice", z=z)
        return mpmath.log(wsigma(L, u + v) / (wsigma(L, u) * wsigma(L, v)))


def f_v(ext: GExtension, z):
    L = ext.L
    with mpmath.workdps(L.prec + GUARD):
        z = _c(z)
        if _near_lattice(L, z) or _near_lattice(L, z + ext.v):
            raise PoleProximity("z or z + v lies in the lattice", z=z)
        return wsigma(L, ext.v + z) / (ext.sigma_v * wsigma(L, z)) * mpmath.exp(-ext.zeta_v * z)


def g_exp(ext: GExtension, t, z) -> GPoint:
    with mpmath.workdps(ext.L.prec + GUARD):
        t, z = _c(t), _c(z)
        delta = f_v(ext, z) * mpmath.exp(t)
        return GPoint(delta, wp(ext.L, z))


def g_log(ext: GExtension, s: GPoint, u_hint=None) -> GLog:
    """(t, u) with t = -g(u, v) + zeta(v) u + log(delta), log on its principal branch."""
    L = ext.L
    with mpmath.workdps(L.prec + GUARD):
        u = elog(L, s.epoint) if u_hint is None else _c(u_hint)
        if not s.delta:
            raise PoleProximity("delta = 0 is outside the chart")
        t = -green(L, u, ext.v) + ext.zeta_v * u + mpmath.log(s.delta)
        return GLog(t, u)


def g_multiply(ext: GExtension, s1: GPoint, z1, s2: GPoint, z2) -> GPoint:
    """Group law through the sigma cocycle; z1, z2 are elliptic logs of the E-parts."""
    L = ext.L
    with mpmath.workdps(L.prec + GUARD):
        z1, z2 = _c(z1), _c(z2)
        v = ext.v
        S = lambda z: wsigma(L, z)  # noqa: E731
        ratio = S(z1 + z2 + v) * S(z1) * S(z2) * ext.sigma_v / (S(z1 + z2) * S(z1 + v) * S(z2 + v))
        return GPoint(s1.delta * s2.delta * ratio, wp(L, z1 + z2))


def betti_g(ext: GExtension, U: GLog) -> GBetti:
    L = ext.L
    with mpmath.workdps(L.prec + GUARD):
        bt = betti_e(L, U.z)
        a = (U.t - bt.b1 * ext.kappa1 - bt.b2 * ext.kappa2) / _2pii()
        res_t = abs(a * _2pii() + bt.b1 * ext.kappa1 + bt.b2 * ext.kappa2 - U.t)
        res_z = abs(bt.b1 * L.omega1 + bt.b2 * L.omega2 - U.z)
        scale = max(1, abs(U.t), abs(U.z))
        if max(res_t, res_z) > L.tol(12) * scale:
            raise InternalCheckFailed("Betti presentation residual too large", residual=max(res_t, res_z))
        return GBetti(a, bt.b1, bt.b2, L.prec)


def recognize_betti(B: GBetti, m_max: int, tol=None) -> dict | None:
    """Least common denominator m <= m_max with a, b1, b2 all in (1/m)Z.

    a must be real to within 10^(-prec/2); a is read modulo 1.
    """
    tol = tol if tol is not None else mpmath.mpf(10) ** (-B.prec // 2)
    if abs(mpmath.im(B.a)) >= tol:
        return None
    vals = [mpmath.re(B.a), B.b1, B.b2]
    fracs = []
    for x in vals:
        r = rational_recognize(x, m_max, tol)
        if r is None:
            return None
        fracs.append(Fraction(*r))
    m = 1
    for f in fracs:
        m = m * f.denominator // gcd(m, f.denominator)
    if m > m_max:
        return None
    ks = [int(f * m) for f in fracs]
    return {"m": m, "k0": ks[0], "k1": ks[1], "k2": ks[2]}


def g_torsion_test(ext: GExtension, s: GPoint, u_det, m_max: int) -> int | None:
    B = betti_g(ext, g_log(ext, s, u_det))
    rec = recognize_betti(B, m_max)
    return None if rec is None else rec["m"]


# -- CM data and the Ribet section ------------------------------------------


@dataclass(frozen=True)
class CMData:
    quadratic: tuple  # (A, B, C) with A tau^2 + B tau + C = 0
    s2: mpmath.mpc
    residual: mpmath.mpf


def _recognize_real(x, height: int, tol):
    if abs(x) < tol:
        return Fraction(0)
    rel = mpmath.pslq([x, 1], maxcoeff=height, maxsteps=10_000, tol=tol)
    if rel is None or rel[0] == 0:
        return None
    return Fraction(-rel[1], rel[0])


def cm_data(L: Lattice, height: int = 10**6) -> CMData:
    """Certify CM via an integer quadratic for tau, then s2 = (eta2 - tau' eta1)/(omega2 - tau' omega1)."""
    with mpmath.workdps(L.prec + GUARD):
        tau = L.tau
        tol = L.tol(10)
        tr = _recognize_real(2 * mpmath.re(tau), height, tol)
        nm = _recognize_real(abs(tau) ** 2, height, tol)
        if tr is None or nm is None:
            raise NotCM("no small-height quadratic relation for tau", tau=tau)
        A = tr.denominator * nm.denominator // gcd(tr.denominator, nm.denominator)
        quad = (A, int(-tr * A), int(nm * A))
        if max(abs(c) for c in quad) > height:
            raise NotCM("quadratic relation exceeds the height bound", quad=quad)
        if abs(quad[0] * tau**2 + quad[1] * tau + quad[2]) > tol * max(1, abs(tau) ** 2):
            raise NotCM("quadratic relation fails at full precision", quad=quad)
        tb = mpmath.conj(tau)
        den = L.omega2 - tb * L.omega1
        s2 = (L.eta2 - tb * L.eta1) / den
        res = abs(L.eta2 - s2 * L.omega2 - tb * (L.eta1 - s2 * L.omega1))
        return CMData(quad, s2, res)


def s2_value(L: Lattice):
    return cm_data(L).s2


def _int_coords(L: Lattice, z, tol):
    bt = betti_e(L, z)
    m, n = mpmath.nint(bt.b1), mpmath.nint(bt.b2)
    if abs(bt.b1 - m) > tol or abs(bt.b2 - n) > tol:
        return None
    return int(m), int(n)


def endomorphism_matrix(L: Lattice, alpha):
    """Integer matrix of multiplication by alpha on (omega1, omega2), or None."""
    tol = L.tol(15)
    c1 = _int_coords(L, alpha * L.omega1, tol)
    c2 = _int_coords(L, alpha * L.omega2, tol)
    if c1 is None or c2 is None:
        return None
    # columns are images of omega1, omega2
    return ((c1[0], c2[0]), (c1[1], c2[1]))


def check_alpha(L: Lattice, alpha):
    with mpmath.workdps(L.prec + GUARD):
        alpha = _c(alpha)
        if alpha == 0 or abs(mpmath.re(alpha)) > L.tol(10) * abs(alpha):
            raise AlphaNotAntisymmetric("alpha must satisfy conj(alpha) = -alpha != 0", alpha=alpha)
        if endomorphism_matrix(L, alpha) is None:
            raise NotCM("alpha is not an endomorphism of the lattice", alpha=alpha)
        if endomorphism_matrix(L, alpha / 2) is None:
            raise AlphaParity("alpha is not divisible by 2 in the endomorphism ring", alpha=alpha)
        return alpha


@dataclass(frozen=True)
class RibetValue:
    u: mpmath.mpc
    v: mpmath.mpc
    delta: mpmath.mpc
    log_t: mpmath.mpc  # zeta(v) u - s2 u v
    s2: mpmath.mpc


def ribet_delta(L: Lattice, alpha, u) -> RibetValue:
    """delta = sigma(u+v)/(sigma(v) sigma(u)) exp(-s2 u v) with v = alpha u."""
    with mpmath.workdps(L.prec + GUARD):
        alpha = check_alpha(L, alpha)
        u = _c(u)
        v = alpha * u
        for z in (u, v, u + v):
            if _near_lattice(L, z):
                raise PoleProximity("u, alpha u and (1+alpha) u must avoid the lattice", z=z)
        s2 = s2_value(L)
        delta = wsigma(L, u + v) / (wsigma(L, v) * wsigma(L, u)) * mpmath.exp(-s2 * u * v)
        return RibetValue(u, v, delta, wzeta(L, v) * u - s2 * u * v, s2)


def ribet_point(L: Lattice, alpha, u, perturb=None):
    """(extension at v = alpha u, section point, Ribet log).

    ``perturb`` multiplies delta by h(wp(u)) (a generic, non-Ribet section).
    """
    rv = ribet_delta(L, alpha, u)
    ext = extension_make(L, rv.v)
    delta = rv.delta
    if perturb is not None:
        delta = delta * perturb(wp(L, u)[0])
    return ext, GPoint(delta, wp(L, u)), rv


def ribet_betti_closed(L: Lattice, alpha, b1, b2, s2=None) -> GBetti:
    """Betti coordinates of the Ribet logarithm at u = b1 omega1 + b2 omega2.

    From t = zeta(v) u - s2 u v and kappa_i = zeta(v) omega_i - eta_i v the
    zeta(v) terms cancel: 2 pi i a = ((b1 eta1 + b2 eta2) - s2 u) v.  This is
    continuous across the points where sigma(v) or sigma(u + v) vanishes.
    """
    with mpmath.workdps(L.prec + GUARD):
        alpha = _c(alpha)
        s2 = s2_value(L) if s2 is None else s2
        b1, b2 = mpmath.mpf(b1), mpmath.mpf(b2)
        u = b1 * L.omega1 + b2 * L.omega2
        v = alpha * u
        a = ((b1 * L.eta1 + b2 * L.eta2) - s2 * u) * v / _2pii()
        return GBetti(a, b1, b2, L.prec)


def ribet_betti_ray(L: Lattice, alpha, b1, b2, eps=(mpmath.mpf("1e-5"), mpmath.mpf("1e-6"), mpmath.mpf("1e-7"))):
    """Approach u along the ray u (1 - eps) through the full log formula, Richardson-extrapolated.

    Diagnostic for degenerate points; returns (extrapolated a, spread of the
    last two extrapolants).
    """
    vals = []
    for e in eps:
        rb = ribet_betti_full(L, alpha, mpmath.mpf(b1) * (1 - e), mpmath.mpf(b2) * (1 - e))
        vals.append(rb.a)
    r = eps[0] / eps[1]
    first = [(r * vals[i + 1] - vals[i]) / (r - 1) for i in range(len(vals) - 1)]
    if len(first) >= 2:
        second = (r * r * first[1] - first[0]) / (r * r - 1)
        return second, abs(first[1] - first[0])
    return first[0], mpmath.mpf(0)


def ribet_betti_full(L: Lattice, alpha, b1, b2) -> GBetti:
    """Betti coordinates through g_log of the Ribet point (non-degenerate u only)."""
    with mpmath.workdps(L.prec + GUARD):
        u = mpmath.mpf(b1) * L.omega1 + mpmath.mpf(b2) * L.omega2
        ext, s, _rv = ribet_point(L, alpha, u)
        return betti_g(ext, g_log(ext, s, u))


@dataclass(frozen=True)
class RibetCheck:
    n: int
    k: tuple
    m: int
    divides_n2: bool
    betti: GBetti
    full_agrees: bool | None


def ribet_order_check(L0: Lattice, alpha, k1: int, k2: int, n: int, cross_check: bool = True) -> RibetCheck:
    """Order of the Ribet point over u = (k1 omega1 + k2 omega2)/n.

    Recognition uses denominators up to 4 n^2; RecognitionFailed otherwise.
    """
    if n < 2 or gcd(gcd(k1, k2), n) != 1:
        raise ValueError("need n >= 2 and gcd(k1, k2, n) = 1")
    with mpmath.workdps(L0.prec + GUARD):
        alpha = check_alpha(L0, alpha)
        B = ribet_betti_closed(L0, alpha, mpmath.mpf(k1) / n, mpmath.mpf(k2) / n)
        rec = recognize_betti(B, 4 * n * n)
        if rec is None:
            raise RecognitionFailed("Betti coordinates not in (1/m)Z for m <= 4 n^2", n=n, k=(k1, k2), a=B.a)
        B = GBetti(B.a, B.b1, B.b2, B.prec, rec)
        agrees = None
        if cross_check:
            try:
                F = ribet_betti_full(L0, alpha, mpmath.mpf(k1) / n, mpmath.mpf(k2) / n)
                da = F.a - B.a
                agrees = abs(mpmath.im(da)) < L0.tol(15) and abs(da.real - mpmath.nint(da.real)) < L0.tol(15)
            except (PoleProximity, TorsionZeroQ):
                agrees = None
        m = rec["m"]
        return RibetCheck(n, (k1, k2), m, (n * n) % m == 0, B, agrees)


def primitive_torsion(n: int) -> list[tuple[int, int]]:
    """(k1, k2) in [0, n)^2 with gcd(k1, k2, n) = 1: the points of exact order n."""
    return [(k1, k2) for k1 in range(n) for k2 in range(n) if gcd(gcd(k1, k2), n) == 1]


# -- the theta identity ------------------------------------------------------


def kernel_points(L: Lattice, gamma) -> list:
    """Nonzero points of E[gamma] as complex numbers in the period parallelogram."""
    M = endomorphism_matrix(L, gamma)
    if M is None:
        raise NotCM("gamma is not an endomorphism", gamma=gamma)
    (a, b), (c, d) = M
    det = a * d - b * c
    pts = set()
    # x in [0,1)^2 with M x integral: x = M^{-1} y
    for y1 in range(-abs(det) * 2, abs(det) * 2 + 1):
        for y2 in range(-abs(det) * 2, abs(det) * 2 + 1):
            x1 = Fraction(d * y1 - b * y2, det) % 1
            x2 = Fraction(-c * y1 + a * y2, det) % 1
            pts.add((x1, x2))
    pts.discard((Fraction(0), Fraction(0)))
    if len(pts) != abs(det) - 1:
        raise InternalCheckFailed("kernel enumeration size mismatch", found=len(pts), det=det)
    return [mpmath.mpf(x1.numerator) / x1.denominator * L.omega1 + mpmath.mpf(x2.numerator) / x2.denominator * L.omega2
            for x1, x2 in sorted(pts)]


def theta_identity_residual(L: Lattice, gamma, z):
    """|(theta(gamma z)/theta(z)^N)^2 - gamma^2 prod (wp(z) - wp(e))|, relative to the RHS."""
    with mpmath.workdps(L.prec + GUARD):
        gamma, z = _c(gamma), _c(z)
        s2 = s2_value(L)
        theta = lambda w: wsigma(L, w) * mpmath.exp(-s2 * w * w / 2)  # noqa: E731
        N = int(mpmath.nint(abs(gamma) ** 2))
        lhs = (theta(gamma * z) / theta(z) ** N) ** 2
        pz = wp(L, z)[0]
        rhs = gamma**2
        for e in kernel_points(L, gamma):
            rhs *= pz - wp(L, e)[0]
        return abs(lhs - rhs) / max(1, abs(rhs))
