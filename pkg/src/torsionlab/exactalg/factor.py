"""Factorization over Q and square roots in number fields, backed by sympy."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import sympy

from .fields import NFElem, QQ, number_field

_X = sympy.Symbol("x")
_T = sympy.Symbol("t")


def _to_sympy_poly(coeffs: Sequence[Fraction], var=_X) -> sympy.Poly:
    return sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(coeffs)], var, domain="QQ")


def _from_sympy_coeffs(p: sympy.Poly) -> list[Fraction]:
    out = []
    for c in reversed(p.all_coeffs()):
        c = sympy.Rational(c)
        out.append(Fraction(int(c.p), int(c.q)))
    return out


@lru_cache(maxsize=4096)
def factor_qq(coeffs: tuple) -> tuple:
    """Factor a rational polynomial: returns (content, ((monic_factor_coeffs, multiplicity), ...))."""
    p = _to_sympy_poly(list(coeffs))
    content, factors = p.factor_list()
    out = []
    for f, e in factors:
        lc = f.LC()
        f = f.quo_ground(lc)
        content = content * lc**e
        out.append((tuple(_from_sympy_coeffs(f)), e))
    out.sort(key=lambda fe: (len(fe[0]), fe[0]))
    c = sympy.Rational(content)
    return Fraction(int(c.p), int(c.q)), tuple(out)


def is_irreducible_qq(coeffs: Sequence) -> bool:
    _, factors = factor_qq(tuple(Fraction(c) for c in coeffs))
    return len(factors) == 1 and factors[0][1] == 1


def factor_poly_qq(f):
    """Factor a FieldPoly over QQ into monic irreducibles with multiplicities."""
    from .poly import FieldPoly

    if f.field != QQ:
        raise ValueError("factor_poly_qq needs a rational polynomial")
    content, factors = factor_qq(tuple(f.coeffs))
    return content, [(FieldPoly(c, QQ, f.var), e) for c, e in factors]


@lru_cache(maxsize=256)
def _sympy_field(min_poly: tuple):
    m = _to_sympy_poly(list(min_poly), _T)
    return sympy.QQ.algebraic_field(sympy.CRootOf(m.as_expr(), 0))


def nf_sqrt(x: NFElem) -> NFElem | None:
    """A square root of ``x`` inside its own field, or None if x is not a square.

    Factors Y^2 - x over the field with sympy (Trager's algorithm); the
    returned root is verified exactly with our own arithmetic.
    """
    K = x.parent
    if not x:
        return K.zero
    if x.is_rational():
        r = QQ.sqrt(x.coords[0])
        if r is not None:
            return K(r)
    # N(y^2) = N(y)^2: a non-square norm rules x out cheaply
    if QQ.sqrt(x.norm()) is None:
        return None
    SK = _sympy_field(K.min_poly)
    el = SK([sympy.QQ(c.numerator, c.denominator) for c in reversed(x.coordinates())])
    poly = sympy.Poly.from_list([SK.one, SK.zero, -el], sympy.Symbol("Y"), domain=SK)
    _, factors = poly.factor_list()
    for f, _e in factors:
        if f.degree() != 1:
            continue
        a1, a0 = f.rep.to_list()
        r = SK.quo(-a0, a1)
        coords = [Fraction(int(c.numerator), int(c.denominator)) for c in reversed(r.to_list())]
        y = K(coords)
        if y * y != x:
            raise ArithmeticError("square root from sympy failed exact verification")
        return y
    return None
