"""Quartic curves v^2 = Q(u) and their Jacobians.

Write Q = A^2 + R with A = c u^2 + a1 u + a0 (c^2 = lc(Q)) and deg R <= 1,
R = r1 u + r0.  With s = v + A the map

    X' = 2 c s,        Y' = 4 c u s + 2 a1 s + r1

satisfies (c Y')^2 = X'^3 + B X'^2 + c (2 a1 r1 - 4 c r0) X' + c^2 r1^2 where
B = a1^2 - 4 c a0.  Shifting X = X' + B/3 and setting Y = -c Y' gives a short
Weierstrass model.  The map sends the point at infinity with v/u^2 -> +c
(called inf+) to O, so it is the Abel-Jacobi map with base inf+, and
inf- goes to (B/3, c r1).  For Q = u^4 + u + lam this is
phi(u, v) = (2(v + u^2), -(4u(v + u^2) + 1)) on Y^2 = X^3 - 4 lam X + 1,
and class((inf+) - (inf-)) = -phi(inf-) = (0, -1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from ..errors import (
    BranchNotInField,
    DenominatorZero,
    InternalCheckFailed,
    NonSquareLeadingCoeff,
    NotSquarefree,
    RootSelectorInvalid,
)
from ..exactalg import QQ, FieldPoly, NFElem, complex_roots, is_squarefree, number_field, sort_roots
from ..exactalg.fields import RationalField
from .curves import O, ECPoint, ShortWeierstrass, _add, _exact_zero, numeric_add, numeric_torsion_order


def quartic_coefficients(q, c):
    """Short-model data from quartic coefficients q = (q0..q4) and c with c^2 = q4.

    Pure ring arithmetic (plus division by c and small integers), so callers
    may pass symbolic coefficients.  Returns a dict with a1, a0, r1, r0, B, a, b.
    """
    q0, q1, q2, q3, q4 = q
    a1 = q3 / (2 * c)
    a0 = (q2 - a1 * a1) / (2 * c)
    r1 = q1 - 2 * a1 * a0
    r0 = q0 - a0 * a0
    B = a1 * a1 - 4 * c * a0
    C = c * (2 * a1 * r1 - 4 * c * r0)
    Dc = c * c * r1 * r1
    a = C - B * B / 3
    b = 2 * B**3 / 27 - B * C / 3 + Dc
    return {"a1": a1, "a0": a0, "r1": r1, "r0": r0, "B": B, "a": a, "b": b}


def _phi(d, c, u, v):
    s = v + (c * u + d["a1"]) * u + d["a0"]
    Xp = 2 * c * s
    Yp = 4 * c * u * s + 2 * d["a1"] * s + d["r1"]
    return Xp + d["B"] / 3, -c * Yp


def _phi_inverse(d, c, X, Y):
    Xp = X - d["B"] / 3
    if not Xp if not isinstance(Xp, mpmath.mpc) else Xp == 0:
        raise DenominatorZero("point is the image of inf-")
    s = Xp / (2 * c)
    Yp = -Y / c
    u = (Yp - d["r1"] - 2 * d["a1"] * s) / (4 * c * s)
    v = s - ((c * u + d["a1"]) * u + d["a0"])
    return u, v


@dataclass(frozen=True)
class QuarticModel:
    Q: FieldPoly
    c: object
    data: dict
    jacobian: ShortWeierstrass
    p_class: ECPoint  # class of (inf+) - (inf-)

    def phi(self, u, v) -> ECPoint:
        X, Y = _phi(self.data, self.c, u, v)
        return ECPoint(X, Y)

    def phi_inverse(self, P: ECPoint):
        if P.is_zero:
            raise DenominatorZero("O is the image of inf+")
        return _phi_inverse(self.data, self.c, P.X, P.Y)

    def embedded(self, index: int = 0):
        """Complex copy of (c, data) at coefficient embedding ``index``."""
        emb = _embed_value(index)
        return emb(self.c), {k: emb(v) for k, v in self.data.items()}

    def phi_numeric(self, u, v, index: int = 0) -> ECPoint:
        c, d = self.embedded(index)
        X, Y = _phi(d, c, mpmath.mpc(u), mpmath.mpc(v))
        return ECPoint(X, Y)

    def phi_inverse_numeric(self, P: ECPoint, index: int = 0):
        c, d = self.embedded(index)
        return _phi_inverse(d, c, mpmath.mpc(P.X), mpmath.mpc(P.Y))

    def to_dict(self) -> dict:
        return {"Q": str(self.Q), "jacobian": self.jacobian.to_dict(), "p_class": self.p_class.to_dict()}


def _embed_value(index):
    def emb(x):
        if isinstance(x, NFElem):
            return x.embed(index)
        x = Fraction(x)
        return mpmath.mpc(mpmath.mpf(x.numerator) / x.denominator)

    return emb


def quartic_jacobian(Q: FieldPoly) -> QuarticModel:
    if Q.degree != 4:
        raise ValueError("Q must have degree 4")
    if not is_squarefree(Q):
        raise NotSquarefree("quartic has a repeated root", Q=Q)
    c = Q.field.sqrt(Q.lc())
    if c is None:
        raise NonSquareLeadingCoeff("leading coefficient is not a square", Q=Q)
    d = quartic_coefficients(list(Q.coeffs), c)
    E = ShortWeierstrass(d["a"], d["b"], Q.field)
    inf_minus = ECPoint(Q.field(d["B"] / 3), Q.field(c * d["r1"]))
    if not E.contains(inf_minus):
        raise InternalCheckFailed("image of inf- is off the Jacobian")
    return QuarticModel(Q, c, d, E, -inf_minus)


def branch(model: QuarticModel, u0, build_extension: bool = True):
    """(u0, v0) with v0 = sqrt(Q(u0)), building QQ(sqrt(Q(u0))) when needed."""
    K = model.Q.field
    val = model.Q(K(u0))
    if not val:
        return K(u0), val
    root = K.sqrt(val)
    if root is not None:
        return K(u0), root
    if not build_extension or not isinstance(K, RationalField):
        raise BranchNotInField("sqrt(Q(u0)) generates an extension", u0=u0, value=val)
    L = number_field((-Fraction(val), Fraction(0), Fraction(1)), "s")
    return L(u0), L.gen()


def abel_jacobi(model: QuarticModel, u0, sign: int = 1, build_extension: bool = True) -> ECPoint:
    """phi(u0, sign * sqrt(Q(u0))); u0 = None selects inf+ (sign 1) or inf- (sign -1)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if u0 is None:
        return O if sign == 1 else -model.p_class
    u, v = branch(model, u0, build_extension)
    P = model.phi(u, sign * v)
    if not model.jacobian.contains(P):
        raise InternalCheckFailed("Abel-Jacobi image is off the curve", u0=u0)
    return P


def divisor_class(model: QuarticModel, u0, build_extension: bool = True) -> ECPoint:
    """Class of (q+) - (q-) for q+- = (u0, +-sqrt(Q(u0)))."""
    Pp = abel_jacobi(model, u0, 1, build_extension)
    Pm = abel_jacobi(model, u0, -1, build_extension)
    return _add(model.jacobian.a, Pp, -Pm, _exact_zero)


# -- case (ii) of the squared-factor theorem -------------------------------


@dataclass(frozen=True)
class RhoCaseII:
    lam: object
    m: object
    half: tuple  # half of p_W on y^2 = 4x^3 - lam x + 1/16
    e3: tuple
    total: tuple  # half + e3 on the same model
    rho: object
    v_plus: object
    q_class: ECPoint  # class (q+) - (q-) on Y^2 = X^3 - 4 lam X + 1
    q_order: int | None
    selectors: dict

    def to_dict(self, digits: int = 30) -> dict:
        from ..numfmt import fmt_complex

        f = lambda z: fmt_complex(z, digits)  # noqa: E731
        return {
            "lam": f(self.lam),
            "m": f(self.m),
            "half_pW": [f(z) for z in self.half],
            "e3": [f(z) for z in self.e3],
            "rho": f(self.rho),
            "q_order": self.q_order,
            "selectors": self.selectors,
        }


def _we_add(lam, P, Q, tol):
    """Addition on y^2 = 4x^3 - lam x + 1/16 via X = 4x, Y = 4y."""
    a = -4 * lam
    R = numeric_add(a, ECPoint(4 * P[0], 4 * P[1]), ECPoint(4 * Q[0], 4 * Q[1]), tol)
    if R.is_zero:
        return None
    return R.X / 4, R.Y / 4


def three_torsion_points(lam, prec: int) -> list:
    """The eight nonzero 3-torsion points of Y^2 = X^3 - 4 lam X + 1, in a fixed order.

    Order: X-roots of psi_3 sorted (real ascending, then complex), each with
    the principal square root Y first and its negative second.
    """
    a = -4 * lam
    psi3 = [-a * a, mpmath.mpc(12), 6 * a, mpmath.mpc(0), mpmath.mpc(3)]
    from ..exactalg.roots import complex_roots_dense

    xs = sort_roots(complex_roots_dense(psi3, prec), prec)
    out = []
    for X in xs:
        Y = mpmath.sqrt(X**3 + a * X + 1)
        out.append(ECPoint(X, Y))
        out.append(ECPoint(X, -Y))
    return out


def rho_case_ii(lam, m_choice: int = 0, e3_choice: int | None = None, prec: int = 50, embedding: int = 0) -> RhoCaseII:
    """rho(lam) = (4y - 1)/(8x) at the point half(p_W) + e3 of y^2 = 4x^3 - lam x + 1/16.

    half(p_W) = (m^2/8, -m^3/8 + 1/4) with m a root of m^4 - 8m + 16 lam; the
    selectors index the sorted roots m (real ascending, then complex) and the
    list from :func:`three_torsion_points`.  ``e3_choice=None`` picks the first
    real 3-torsion point (there is one whenever lam is real).  Computed
    numerically at ``prec`` digits; lam may be a number-field element, taken
    at ``embedding``.
    """
    with mpmath.workdps(prec + 10):
        lam_c = _embed_value(embedding)(lam) if not isinstance(lam, (mpmath.mpc, mpmath.mpf, complex, float)) else mpmath.mpc(lam)
        tol = mpmath.mpf(10) ** (-(prec // 2))
        from ..exactalg.roots import complex_roots_dense

        ms = sort_roots(complex_roots_dense([16 * lam_c, mpmath.mpc(-8), 0, 0, 1], prec), prec)
        if not 0 <= m_choice < len(ms):
            raise RootSelectorInvalid("m selector out of range", m_choice=m_choice, available=len(ms))
        m = ms[m_choice]
        half = (m**2 / 8, -(m**3) / 8 + mpmath.mpf(1) / 4)
        # 2 * half must be p_W = (0, -1/4)
        dbl = _we_add(lam_c, half, half, tol)
        if dbl is None or abs(dbl[0]) > tol or abs(dbl[1] + mpmath.mpf(1) / 4) > tol:
            raise InternalCheckFailed("half point does not double to p_W", m=m)
        pts = three_torsion_points(lam_c, prec)
        if e3_choice is None:
            e3_choice = next(
                (i for i, P in enumerate(pts) if abs(mpmath.im(P.X)) < tol and abs(mpmath.im(P.Y)) < tol), 0
            )
        if not 0 <= e3_choice < len(pts):
            raise RootSelectorInvalid("e3 selector out of range", e3_choice=e3_choice, available=len(pts))
        E3 = pts[e3_choice]
        e3 = (E3.X / 4, E3.Y / 4)
        total = _we_add(lam_c, half, e3, tol)
        if total is None or abs(total[0]) < tol:
            raise DenominatorZero("x(half p_W + e3) = 0", lam=lam_c)
        rho = (4 * total[1] - 1) / (8 * total[0])
        # q+ = phi^{-1}(-(half + e3)) in short coordinates; v from the inverse map
        X0, Y0 = 4 * total[0], 4 * total[1]
        s = X0 / 2
        v_plus = s - rho**2
        Qrho = rho**4 + rho + lam_c
        if abs(v_plus**2 - Qrho) > tol * max(1, abs(Qrho)):
            raise InternalCheckFailed("rho is not on the expected branch", rho=rho)
        a = -4 * lam_c

        def phi(u, v):
            s_ = v + u * u
            return ECPoint(2 * s_, -(4 * u * s_ + 1))

        Pp, Pm = phi(rho, v_plus), phi(rho, -v_plus)
        q = numeric_add(a, Pp, -Pm, tol)
        order = numeric_torsion_order(a, q, 12, tol)
        return RhoCaseII(
            lam_c, m, half, e3, total, rho, v_plus, q, order,
            {"m_choice": m_choice, "e3_choice": e3_choice, "embedding": embedding},
        )
