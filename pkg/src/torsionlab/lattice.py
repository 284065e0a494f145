"""Period lattices and Weierstrass functions for y^2 = 4x^3 - g2 x - g3 over C.

Periods come from the AGM of root differences and are validated by rebuilding
g2 and g3 from Eisenstein q-series; the basis is then reduced so tau lies in
the standard fundamental domain.  sigma, zeta and wp are evaluated through
Jacobi's theta_1 in the nome q = exp(i pi tau) after reducing z to the
centred period parallelogram; quasi-periodicity factors are reapplied
exactly.  Quasi-periods follow eta_i = 2 zeta(omega_i / 2), so the Legendre
relation reads eta1 omega2 - eta2 omega1 = 2 pi i.
"""

from __future__ import annotations

import itertools
import logging
import threading
from dataclasses import dataclass

import mpmath

from .errors import (
    BranchJump,
    DegenerateCurve,
    IllConditioned,
    InternalCheckFailed,
    PointNotOnCurve,
    PoleProximity,
)
from .exactalg.roots import complex_roots_dense

log = logging.getLogger(__name__)

GUARD = 15  # extra working digits for every evaluation


def _c(x):
    if isinstance(x, str):
        from .numfmt import parse_complex

        return parse_complex(x)
    if hasattr(x, "numerator") and hasattr(x, "denominator") and not isinstance(x, (mpmath.mpf, mpmath.mpc)):
        return mpmath.mpc(mpmath.mpf(x.numerator) / x.denominator)
    return mpmath.mpc(x)


@dataclass(frozen=True)
class Lattice:
    g2: mpmath.mpc
    g3: mpmath.mpc
    omega1: mpmath.mpc
    omega2: mpmath.mpc
    eta1: mpmath.mpc
    eta2: mpmath.mpc
    tau: mpmath.mpc
    prec: int
    roots: tuple = ()

    @property
    def nome(self):
        return mpmath.exp(1j * mpmath.pi * self.tau)

    def legendre_residual(self):
        with mpmath.workdps(self.prec + GUARD):
            return abs(self.eta1 * self.omega2 - self.eta2 * self.omega1 - 2j * mpmath.pi)

    def tol(self, k: int):
        """The tolerance 10^(-prec + k)."""
        return mpmath.mpf(10) ** (-self.prec + k)

    def to_dict(self) -> dict:
        from .numfmt import fmt_complex

        d = self.prec + 5
        return {
            "prec": self.prec,
            **{k: fmt_complex(getattr(self, k), d) for k in ("g2", "g3", "omega1", "omega2", "eta1", "eta2", "tau")},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Lattice":
        prec = int(d["prec"])
        with mpmath.workdps(prec + GUARD):
            vals = {k: _c(d[k]) for k in ("g2", "g3", "omega1", "omega2", "eta1", "eta2", "tau")}
            roots = _cubic_roots(vals["g2"], vals["g3"], prec)
        return cls(prec=prec, roots=tuple(roots), **vals)


def _cubic_roots(g2, g3, prec):
    return complex_roots_dense([-g3, -g2, mpmath.mpc(0), mpmath.mpc(4)], prec + GUARD)


def _agm(a, b, eps):
    """AGM with the 'right' square-root choice |a_n - b_n| <= |a_n + b_n|."""
    for _ in range(10_000):
        if abs(a - b) <= eps * abs(a):
            return a
        a, b = (a + b) / 2, mpmath.sqrt(a * b)
        if abs(a - b) > abs(a + b):
            b = -b
    raise InternalCheckFailed("AGM did not converge")


def _reduce_basis(w1, w2):
    """Reduce (w1, w2) with Im(w2/w1) > 0 so tau is in the fundamental domain."""
    if mpmath.im(w2 / w1) < 0:
        w2 = -w2
    for _ in range(1000):
        tau = w2 / w1
        n = int(mpmath.nint(mpmath.re(tau)))
        if n:
            w2 = w2 - n * w1
            tau = w2 / w1
        if abs(tau) < 1 - mpmath.mpf(10) ** (-mpmath.mp.dps + 5):
            w1, w2 = -w2, w1
            continue
        return w1, w2
    raise InternalCheckFailed("basis reduction did not terminate")


def _canonical_basis(w1, w2):
    """Among reduced bases, prefer omega1 with the largest real part.

    Only the sign is free for interior tau; on the unit circle the rotated
    basis (-w2, w1) is reduced as well.
    """
    cands = [(w1, w2), (-w1, -w2)]
    if abs(abs(w2 / w1) - 1) < mpmath.mpf(10) ** (-mpmath.mp.dps + 8):
        cands += [(-w2, w1), (w2, -w1)]
    good = [c for c in cands if abs(mpmath.re(c[1] / c[0])) <= mpmath.mpf(1) / 2 + mpmath.mpf(10) ** (-mpmath.mp.dps + 8)]
    return max(good or cands, key=lambda c: (mpmath.re(c[0]), mpmath.im(c[0])))


def _eisenstein_g(w1, tau, prec):
    """(g2, g3) of the lattice w1 (Z + tau Z) from E4, E6 q-series."""
    q = mpmath.exp(2j * mpmath.pi * tau)
    eps = mpmath.mpf(10) ** (-prec - GUARD)
    s3 = s5 = mpmath.mpc(0)
    qn = q
    n = 1
    while True:
        t = qn / (1 - qn)
        s3 += n**3 * t
        s5 += n**5 * t
        if abs(qn) * n**5 < eps:
            break
        n += 1
        qn *= q
    E4 = 1 + 240 * s3
    E6 = 1 - 504 * s5
    pi = mpmath.pi
    return 4 * pi**4 * E4 / (3 * w1**4), 8 * pi**6 * E6 / (27 * w1**6)


def _theta(L_or_q, v, deriv: int = 0):
    return mpmath.jtheta(1, v, L_or_q, deriv)


_CACHE: dict = {}
_CACHE_LOCK = threading.Lock()


def periods(g2, g3, prec: int = 50) -> Lattice:
    """Lattice data for y^2 = 4x^3 - g2 x - g3 (cached by (g2, g3, prec))."""
    if prec < 15:
        raise ValueError("prec must be >= 15")
    with mpmath.workdps(prec + GUARD):
        g2, g3 = _c(g2), _c(g3)
        key = (mpmath.nstr(g2, prec + 5), mpmath.nstr(g3, prec + 5), prec)
        with _CACHE_LOCK:
            if key in _CACHE:
                return _CACHE[key]
        L = _periods(g2, g3, prec)
        with _CACHE_LOCK:
            _CACHE.setdefault(key, L)
        return _CACHE[key]


def _periods(g2, g3, prec):
    disc = g2**3 - 27 * g3**2
    scale = max(1, abs(g2) ** 3, abs(g3) ** 2)
    if abs(disc) < mpmath.mpf(10) ** (-prec + 10) * scale:
        raise DegenerateCurve("g2^3 - 27 g3^2 = 0", g2=g2, g3=g3)
    from .exactalg import sort_roots

    roots = sort_roots(_cubic_roots(g2, g3, prec), prec)
    eps = mpmath.mpf(10) ** (-prec - GUARD + 3)
    tol = mpmath.mpf(10) ** (-prec + 10)
    pi = mpmath.pi
    best = None
    for e1, e2, e3 in itertools.permutations(roots):
        a = mpmath.sqrt(e1 - e3)
        for b_sign, c_sign in itertools.product((1, -1), repeat=2):
            b = b_sign * mpmath.sqrt(e1 - e2)
            c = c_sign * mpmath.sqrt(e2 - e3)
            try:
                w1 = pi / _agm(a, b, eps)
                w2 = 1j * pi / _agm(a, c, eps)
            except (InternalCheckFailed, ZeroDivisionError):
                continue
            if abs(mpmath.im(w2 / w1)) < mpmath.mpf(10) ** -8:
                continue
            w1, w2 = _reduce_basis(w1, w2)
            tau = w2 / w1
            G2, G3 = _eisenstein_g(w1, tau, prec)
            err = max(abs(G2 - g2) / max(1, abs(g2)), abs(G3 - g3) / max(1, abs(g3)))
            if best is None or err < best[0]:
                best = (err, w1, w2, tau)
            if err < tol:
                break
        if best and best[0] < tol:
            break
    if best is None or best[0] >= tol:
        raise InternalCheckFailed("no period candidate reproduces (g2, g3)", err=best and best[0])
    _, w1, w2, tau = best
    w1, w2 = _canonical_basis(w1, w2)
    tau = w2 / w1
    q = mpmath.exp(1j * pi * tau)
    th1 = _theta(q, 0, 1)
    th3 = _theta(q, 0, 3)
    eta1 = -(pi**2) * th3 / (3 * w1 * th1)
    # eta2 = 2 zeta(w2/2), evaluated through theta_1 at v = pi tau / 2
    v = pi * tau / 2
    zeta_half = eta1 * (w2 / 2) / w1 + (pi / w1) * _theta(q, v, 1) / _theta(q, v)
    eta2 = 2 * zeta_half
    L = Lattice(g2, g3, w1, w2, eta1, eta2, tau, prec, tuple(roots))
    res = L.legendre_residual()
    if res > L.tol(10):
        raise InternalCheckFailed("Legendre relation fails", residual=res)
    return L


def from_short(a, b, prec: int = 50) -> Lattice:
    """Lattice of Y^2 = X^3 + aX + b, i.e. g2 = -4a, g3 = -4b under (x, y) = (X, 2Y)."""
    with mpmath.workdps(prec + GUARD):
        return periods(-4 * _c(a), -4 * _c(b), prec)


# -- reduction and Betti coordinates ---------------------------------------


@dataclass(frozen=True)
class EBetti:
    b1: mpmath.mpf
    b2: mpmath.mpf

    def to_dict(self, digits: int = 30) -> dict:
        from .numfmt import fmt_real

        return {"b1": fmt_real(self.b1, digits), "b2": fmt_real(self.b2, digits)}


def betti_e(L: Lattice, u) -> EBetti:
    """Real (b1, b2) with u = b1 omega1 + b2 omega2."""
    with mpmath.workdps(L.prec + GUARD):
        u = _c(u)
        w1, w2 = L.omega1, L.omega2
        det = mpmath.re(w1) * mpmath.im(w2) - mpmath.im(w1) * mpmath.re(w2)
        if abs(det) < mpmath.mpf(10) ** -10 * abs(w1) * abs(w2):
            raise IllConditioned("periods are nearly R-dependent", det=det)
        b1 = (mpmath.re(u) * mpmath.im(w2) - mpmath.im(u) * mpmath.re(w2)) / det
        b2 = (mpmath.re(w1) * mpmath.im(u) - mpmath.im(w1) * mpmath.re(u)) / det
        return EBetti(b1, b2)


def _split(L: Lattice, z):
    """z = z0 + m omega1 + n omega2 with z0 in the centred parallelogram."""
    bt = betti_e(L, z)
    m, n = int(mpmath.nint(bt.b1)), int(mpmath.nint(bt.b2))
    return z - m * L.omega1 - n * L.omega2, m, n


def _check_pole(L: Lattice, z0):
    if abs(z0) < mpmath.mpf(10) ** (-L.prec // 2) * abs(L.omega1):
        raise PoleProximity("argument is within 10^(-prec/2) of a lattice point", z=z0)


def _theta_ratios(L: Lattice, z0):
    q = L.nome
    v = mpmath.pi * z0 / L.omega1
    t0 = _theta(q, v)
    return v, [_theta(q, v, k) / t0 for k in (1, 2, 3)], t0


def wsigma(L: Lattice, z):
    with mpmath.workdps(L.prec + GUARD):
        z = _c(z)
        z0, m, n = _split(L, z)
        q = L.nome
        v = mpmath.pi * z0 / L.omega1
        s0 = (L.omega1 / mpmath.pi) * mpmath.exp(L.eta1 * z0**2 / (2 * L.omega1)) * _theta(q, v) / _theta(q, 0, 1)
        if m == 0 and n == 0:
            return s0
        w = m * L.omega1 + n * L.omega2
        e = m * L.eta1 + n * L.eta2
        sign = -1 if (m + n + m * n) % 2 else 1
        return sign * mpmath.exp(e * (z0 + w / 2)) * s0


def wlogsigma(L: Lattice, z):
    """A branch of log sigma(z), continuous in z on the centred parallelogram."""
    with mpmath.workdps(L.prec + GUARD):
        z = _c(z)
        z0, m, n = _split(L, z)
        q = L.nome
        v = mpmath.pi * z0 / L.omega1
        ls = mpmath.log(L.omega1 / mpmath.pi) + L.eta1 * z0**2 / (2 * L.omega1) + mpmath.log(_theta(q, v) / _theta(q, 0, 1))
        w = m * L.omega1 + n * L.omega2
        e = m * L.eta1 + n * L.eta2
        return ls + e * (z0 + w / 2) + (1j * mpmath.pi if (m + n + m * n) % 2 else 0)


def wzeta(L: Lattice, z):
    with mpmath.workdps(L.prec + GUARD):
        z = _c(z)
        z0, m, n = _split(L, z)
        _check_pole(L, z0)
        _, (r1, _r2, _r3), _ = _theta_ratios(L, z0)
        val = L.eta1 * z0 / L.omega1 + (mpmath.pi / L.omega1) * r1
        return val + m * L.eta1 + n * L.eta2


def wp(L: Lattice, z):
    """(wp(z), wp'(z))."""
    with mpmath.workdps(L.prec + GUARD):
        z = _c(z)
        z0, _m, _n = _split(L, z)
        _check_pole(L, z0)
        # extra digits against cancellation near the pole
        extra = int(max(0, -mpmath.log10(abs(z0) / abs(L.omega1)))) * 3
        with mpmath.workdps(L.prec + GUARD + extra):
            _, (r1, r2, r3), _ = _theta_ratios(L, z0)
            k = mpmath.pi / L.omega1
            p = -L.eta1 / L.omega1 - k**2 * (r2 - r1**2)
            dp = -(k**3) * (r3 - 3 * r1 * r2 + 2 * r1**3)
        return p, dp


def curve_residual(L: Lattice, X, Y):
    return abs(Y**2 - (4 * X**3 - L.g2 * X - L.g3))


def reduce_to_parallelogram(L: Lattice, z):
    """Representative of z in [0,1) omega1 + [0,1) omega2."""
    with mpmath.workdps(L.prec + GUARD):
        bt = betti_e(L, z)
        m, n = int(mpmath.floor(bt.b1)), int(mpmath.floor(bt.b2))
        z = z - m * L.omega1 - n * L.omega2
        # snap coordinates that round to 1 back to 0
        bt = betti_e(L, z)
        tiny = mpmath.mpf(10) ** (-L.prec + 5)
        if bt.b1 > 1 - tiny:
            z -= L.omega1
        if bt.b2 > 1 - tiny:
            z -= L.omega2
        return z


def elog(L: Lattice, P) -> mpmath.mpc:
    """Elliptic logarithm of P = (X, Y) on y^2 = 4x^3 - g2 x - g3 (None for O)."""
    if P is None:
        return mpmath.mpc(0)
    with mpmath.workdps(L.prec + GUARD):
        X, Y = _c(P[0]), _c(P[1])
        if curve_residual(L, X, Y) > L.tol(12) * max(1, abs(X) ** 3):
            raise PointNotOnCurve("point is not on the curve", X=X, Y=Y)
        e1, e2, e3 = L.roots
        tol = L.tol(8) * max(1, abs(X))
        candidates = []
        try:
            candidates.append(mpmath.elliprf(X - e1, X - e2, X - e3))
        except (ValueError, ZeroDivisionError):
            pass
        # crude fallbacks: integrate from infinity along a ray, then Newton
        candidates.append(_elog_quad(L, X))
        for z in candidates:
            p, dp = _safe_wp(L, z)
            if p is None or abs(p - X) > L.tol(12) * max(1, abs(X)):
                # Newton is skipped at 2-torsion, where wp' vanishes and it stalls
                z = _newton(L, z, X)
                if z is None:
                    continue
                p, dp = wp(L, z)
                if abs(p - X) > tol:
                    continue
            if abs(dp + Y) < abs(dp - Y):
                z = -z
            p, dp = wp(L, z)
            if abs(dp - Y) <= L.tol(8) * max(1, abs(Y)):
                return reduce_to_parallelogram(L, z)
        raise InternalCheckFailed("elliptic logarithm did not converge", X=X, Y=Y)


def _safe_wp(L, z):
    try:
        return wp(L, z)
    except PoleProximity:
        return None, None


def _elog_quad(L, X):
    f = lambda t: 1 / mpmath.sqrt(4 * t**3 - L.g2 * t - L.g3)  # noqa: E731
    with mpmath.workdps(30):
        return mpmath.quad(lambda s: f(X + s) if s else 0, [0, 1, mpmath.inf])


def _newton(L, z, X, iters: int = 60):
    for _ in range(iters):
        try:
            p, dp = wp(L, z)
        except PoleProximity:
            return None
        if dp == 0:
            return z
        step = (p - X) / dp
        z = z - step
        if abs(step) < L.tol(3) * abs(L.omega1):
            return z
    return z


# -- path continuation ------------------------------------------------------


class LogContinuation:
    """Nearest-translate continuation of logarithms along a parameter path.

    Not thread-safe: one instance per path.
    """

    def __init__(self, start=None):
        self.prev = start

    def step(self, z, L: Lattice):
        if self.prev is None:
            self.prev = z
            return z
        with mpmath.workdps(L.prec + GUARD):
            bt = betti_e(L, self.prev - z)
            best = None
            for dm in (-1, 0, 1):
                for dn in (-1, 0, 1):
                    m, n = int(mpmath.nint(bt.b1)) + dm, int(mpmath.nint(bt.b2)) + dn
                    cand = z + m * L.omega1 + n * L.omega2
                    if best is None or abs(cand - self.prev) < abs(best - self.prev):
                        best = cand
            limit = min(abs(L.omega1), abs(L.omega2)) / 4
            if abs(best - self.prev) > limit:
                raise BranchJump("step exceeds a quarter of the shortest period", jump=abs(best - self.prev))
            self.prev = best
            return best
