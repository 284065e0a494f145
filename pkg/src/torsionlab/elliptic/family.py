"""Torsion parameters for the family E_lam: Y^2 = X^3 - 4 lam X + 1 with P = (0, -1).

The condition "[n]P = O" is a polynomial in lam obtained by running the
division-polynomial recurrence with x = 0, y = -1, a = -4 lam, b = 1 over
QQ[lam].  Exact order n is isolated by discarding irreducible factors shared
with lower-order conditions and with the singular locus 256 lam^3 = 27.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from ..errors import DegenerateFamily, InternalCheckFailed
from ..exactalg import QQ, FieldPoly, NFElem, factor_poly_qq, number_field, sort_roots
from ..exactalg.roots import complex_roots
from .curves import ECPoint, ShortWeierstrass, numeric_torsion_order, torsion_order

log = logging.getLogger(__name__)

LAM = "l"
_lam = FieldPoly.x(QQ, LAM)
SINGULAR_LOCUS = FieldPoly([-27, 0, 0, 256], QQ, LAM)

_psi_lock = threading.Lock()
_psi: dict[int, FieldPoly] = {}


def _base_psi() -> dict:
    a = -4 * _lam
    one = FieldPoly([1], QQ, LAM)
    # psi_n at x = 0, y = -1, b = 1 (y-factors of even psi_n kept)
    return {
        0: FieldPoly([], QQ, LAM),
        1: one,
        2: -2 * one,
        3: -(a * a),
        4: -4 * (-8 * one - a**3),
    }


def psi_at_P(n: int) -> FieldPoly:
    """psi_n(P) as a polynomial in lam (y = -1 substituted, so no y-factors remain)."""
    with _psi_lock:
        if not _psi:
            _psi.update(_base_psi())
        if n in _psi:
            return _psi[n]
    for k in range(5, n + 1):
        if k in _psi:
            continue
        m = k // 2
        f = _psi
        if k % 2:
            val = f[m + 2] * f[m] ** 3 - f[m - 1] * f[m + 1] ** 3
        else:
            # psi_2m = psi_m (psi_{m+2} psi_{m-1}^2 - psi_{m-2} psi_{m+1}^2) / (2y), y = -1
            val = f[m] * (f[m + 2] * f[m - 1] ** 2 - f[m - 2] * f[m + 1] ** 2) * Fraction(-1, 2)
        with _psi_lock:
            _psi.setdefault(k, val)
    return _psi[n]


def _divides(f: FieldPoly, g: FieldPoly) -> bool:
    return not g.is_zero() and (g % f).is_zero()


@lru_cache(maxsize=None)
def order_factors(n: int) -> tuple:
    """Monic irreducible factors (over QQ) of the exact-order-n condition."""
    if n < 2:
        raise ValueError("n must be >= 2")
    cond = psi_at_P(n)
    if cond.is_zero():
        raise DegenerateFamily("order condition vanishes identically", n=n)
    if cond.is_constant():
        return ()
    lower = [psi_at_P(d) for d in range(2, n) if n % d == 0]
    _, factors = factor_poly_qq(cond)
    keep = []
    for f, _mult in factors:
        if _divides(f, SINGULAR_LOCUS):
            continue
        if any(_divides(f, g) for g in lower):
            continue
        keep.append(f)
    return tuple(keep)


def order_condition(n: int) -> FieldPoly:
    """Squarefree product of the exact-order-n factors; its degree is |S_n|."""
    out = FieldPoly([1], QQ, LAM)
    for f in order_factors(n):
        out = out * f
    return out


@dataclass(frozen=True)
class TorsionParameter:
    """One Galois orbit of parameters lam with P of exact order ``order``.

    ``lam`` is a Fraction for rational parameters, else the generator of the
    number field QQ[t]/(minpoly); ``degree`` conjugates are represented.
    """

    lam: object
    order: int
    minpoly: FieldPoly

    @property
    def degree(self) -> int:
        return self.minpoly.degree

    @property
    def field(self):
        return self.lam.parent if isinstance(self.lam, NFElem) else QQ

    def curve(self) -> ShortWeierstrass:
        return family_curve(self.lam)

    def embeddings(self, prec: int = 40) -> list:
        if isinstance(self.lam, NFElem):
            return list(self.lam.parent.embeddings(prec))
        return [mpmath.mpc(mpmath.mpf(self.lam.numerator) / self.lam.denominator)]

    def to_dict(self, prec: int = 20) -> dict:
        from ..numfmt import fmt_complex

        return {
            "order": self.order,
            "minpoly": str(self.minpoly.map_coeffs(lambda c: c)).replace(LAM, "t"),
            "degree": self.degree,
            "rational": None if isinstance(self.lam, NFElem) else str(self.lam),
            "embeddings": [fmt_complex(z, prec) for z in self.embeddings(max(prec, 20))],
        }


def family_curve(lam) -> ShortWeierstrass:
    field = lam.parent if isinstance(lam, NFElem) else QQ
    return ShortWeierstrass(-4 * field(lam), 1, field)


def family_point(lam) -> ECPoint:
    E = family_curve(lam)
    return E.point(0, -1)


def verify_numeric(tp: TorsionParameter, prec: int = 40) -> bool:
    """Order check at every complex embedding of lam, at ``prec`` digits."""
    with mpmath.workdps(prec):
        tol = mpmath.mpf(10) ** (-prec // 2)
        for lam in tp.embeddings(prec):
            a = -4 * lam
            P = ECPoint(mpmath.mpc(0), mpmath.mpc(-1))
            if numeric_torsion_order(a, P, tp.order, tol) != tp.order:
                return False
    return True


def torsion_parameters(n: int, verify: bool = True, prec: int = 40) -> list[TorsionParameter]:
    """All parameter orbits where P has exact order n, each verified exactly and numerically."""
    out = []
    for f in order_factors(n):
        if f.degree == 1:
            lam = -f[0]
        else:
            K = number_field(tuple(f.coeffs), "t")
            lam = K.gen()
        tp = TorsionParameter(lam, n, f)
        if verify:
            E = tp.curve()
            if torsion_order(E, family_point(lam), n) != n:
                raise InternalCheckFailed("exact torsion check failed", n=n, minpoly=f)
            if not verify_numeric(tp, prec):
                raise InternalCheckFailed("numeric torsion check failed", n=n, minpoly=f)
        out.append(tp)
    return out


def torsion_count(n: int) -> int:
    """|S_n|: number of complex lam with P of exact order n."""
    return order_condition(n).degree if n >= 2 else 0


def lam_roots(n: int, prec: int = 40) -> list:
    """All complex lam of exact order n, sorted (real ascending, then complex)."""
    f = order_condition(n)
    if f.degree < 1:
        return []
    return sort_roots(complex_roots(f, prec), prec)
