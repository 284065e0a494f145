"""Coefficient fields: the rationals and absolute number fields Q[t]/(m(t)).

Rationals are plain :class:`fractions.Fraction` values.  Number-field elements
are :class:`NFElem` instances holding power-basis coordinates.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Sequence

import mpmath

from . import dense
from ..errors import FieldMismatch, ParseError

Rational = Fraction


def to_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError as exc:
            raise ParseError(f"not a rational: {x!r}") from exc
    if isinstance(x, NFElem):
        if x.is_rational():
            return x.coords[0]
        raise FieldMismatch("number-field element is not rational", value=x)
    raise TypeError(f"cannot coerce {type(x).__name__} to a rational")


def rational_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class RationalField:
    """The field Q.  A singleton; use the module-level ``QQ``."""

    degree = 1
    name = "QQ"

    def __call__(self, x) -> Fraction:
        return to_rational(x)

    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def contains(self, x) -> bool:
        return isinstance(x, (int, Fraction))

    def sqrt(self, x) -> Fraction | None:
        return rational_sqrt(to_rational(x))

    def embed(self, x, index: int = 0):
        return mpmath.mpf(x.numerator) / x.denominator

    def format(self, x) -> str:
        return format_rational(to_rational(x))

    def bit_size(self, x) -> int:
        return max(x.numerator.bit_length(), x.denominator.bit_length())

    def __repr__(self) -> str:
        return "QQ"

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalField)

    def __hash__(self) -> int:
        return hash("QQ")


QQ = RationalField()


class NumberField:
    """Absolute number field Q[t]/(m(t)) for a monic m with rational coefficients.

    ``embeddings(prec)`` returns the complex roots of m in a fixed order:
    real roots ascending, then non-real roots by (real part, imaginary part).
    Element ``x`` is embedded at root index ``i`` via ``x.embed(i)``.
    """

    def __init__(self, min_poly: Sequence, name: str = "t", check_irreducible: bool = True):
        coeffs = dense.trim([to_rational(c) for c in min_poly])
        if len(coeffs) < 2:
            raise ValueError("minimal polynomial must have degree >= 1")
        if coeffs[-1] != 1:
            raise ValueError("minimal polynomial must be monic")
        self.min_poly = tuple(coeffs)
        self.degree = len(coeffs) - 1
        self.name = name
        self.certified_irreducible = None
        if check_irreducible:
            from .factor import is_irreducible_qq

            self.certified_irreducible = is_irreducible_qq(self.min_poly)
            if not self.certified_irreducible:
                raise ValueError(f"minimal polynomial is reducible: {self.min_poly_str()}")
        self._embedding_cache: dict[int, list] = {}

    # -- construction helpers -------------------------------------------------
    def __call__(self, x) -> "NFElem":
        if isinstance(x, NFElem):
            if x.parent is not self and x.parent != self:
                raise FieldMismatch("element belongs to another number field")
            return x
        if isinstance(x, (list, tuple)):
            return NFElem(self, x)
        return NFElem(self, [to_rational(x)])

    @property
    def zero(self) -> "NFElem":
        return NFElem(self, [])

    @property
    def one(self) -> "NFElem":
        return NFElem(self, [Fraction(1)])

    def gen(self) -> "NFElem":
        if self.degree == 1:
            return NFElem(self, [-self.min_poly[0]])
        return NFElem(self, [Fraction(0), Fraction(1)])

    def contains(self, x) -> bool:
        return isinstance(x, NFElem) and x.parent == self

    # -- embeddings ---------------------------------------------------------
    def embeddings(self, prec: int = 50) -> list:
        """Complex roots of the minimal polynomial at ``prec`` digits (cached)."""
        for p, roots in self._embedding_cache.items():
            if p >= prec:
                return roots
        from .roots import complex_roots_dense, sort_roots

        roots = sort_roots(complex_roots_dense(list(self.min_poly), prec), prec)
        self._embedding_cache[prec] = roots
        return roots

    def real_embedding_indices(self, prec: int = 50) -> list[int]:
        tol = mpmath.mpf(10) ** (-(prec // 2))
        return [i for i, r in enumerate(self.embeddings(prec)) if abs(mpmath.im(r)) < tol]

    # -- arithmetic support ------------------------------------------------
    def reduce(self, coeffs: list) -> tuple:
        """Reduce a coordinate list modulo the minimal polynomial."""
        r = list(coeffs)
        d = self.degree
        m = self.min_poly
        for k in range(len(r) - 1, d - 1, -1):
            c = r[k]
            if c:
                for j in range(d):
                    if m[j]:
                        r[k - d + j] -= c * m[j]
        del r[d:]
        r = [to_rational(c) for c in r]
        while r and not r[-1]:
            r.pop()
        return tuple(r)

    def sqrt(self, x) -> "NFElem | None":
        from .factor import nf_sqrt

        return nf_sqrt(self(x))

    def embed(self, x, index: int = 0):
        return self(x).embed(index)

    def format(self, x) -> str:
        return self(x).format()

    def bit_size(self, x) -> int:
        return max((QQ.bit_size(c) for c in self(x).coords), default=1)

    def min_poly_str(self) -> str:
        from .poly import format_dense

        return format_dense(list(self.min_poly), self.name)

    def __repr__(self) -> str:
        return f"NumberField({self.min_poly_str()})"

    def __eq__(self, other) -> bool:
        return isinstance(other, NumberField) and self.min_poly == other.min_poly

    def __hash__(self) -> int:
        return hash(("NF", self.min_poly))


class NFElem:
    """Element of a :class:`NumberField` in the power basis 1, t, ..., t^(d-1).

    ``coords`` is stored trimmed (no trailing zeros); ``coordinates()`` returns
    the padded length-``degree`` sequence.
    """

    __slots__ = ("parent", "coords")

    def __init__(self, parent: NumberField, coords):
        self.parent = parent
        if len(coords) > parent.degree or any(not isinstance(c, Fraction) for c in coords):
            self.coords = parent.reduce(list(coords))
        else:
            c = list(coords)
            while c and not c[-1]:
                c.pop()
            self.coords = tuple(c)

    def coordinates(self) -> tuple:
        return self.coords + (Fraction(0),) * (self.parent.degree - len(self.coords))

    def is_rational(self) -> bool:
        return len(self.coords) <= 1

    def _coerce(self, other):
        if isinstance(other, NFElem):
            if other.parent is not self.parent and other.parent != self.parent:
                raise FieldMismatch("elements of different number fields")
            return other
        if isinstance(other, (int, Fraction)):
            return NFElem(self.parent, [Fraction(other)] if other else [])
        return NotImplemented

    def __bool__(self) -> bool:
        return bool(self.coords)

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.coords == o.coords

    def __hash__(self) -> int:
        if self.is_rational():
            return hash(self.coords[0] if self.coords else 0)
        return hash(self.coords)

    def __neg__(self):
        return NFElem(self.parent, [-c for c in self.coords])

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return NFElem(self.parent, dense.add(self.coords, o.coords))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return NFElem(self.parent, dense.sub(self.coords, o.coords))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return NFElem(self.parent, [c * other for c in self.coords] if other else [])
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return NFElem(self.parent, self.parent.reduce(dense.mul(list(self.coords), list(o.coords))))

    __rmul__ = __mul__

    def inverse(self) -> "NFElem":
        if not self.coords:
            raise ZeroDivisionError("inverse of zero in a number field")
        if self.is_rational():
            return NFElem(self.parent, [1 / self.coords[0]])
        return NFElem(self.parent, _poly_inverse_mod(list(self.coords), list(self.parent.min_poly)))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / other)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.parent.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def embed(self, index: int = 0, prec: int | None = None):
        prec = prec or max(mpmath.mp.dps, 15)
        root = self.parent.embeddings(prec)[index]
        acc = mpmath.mpc(0)
        for c in reversed(self.coords):
            acc = acc * root + mpmath.mpf(c.numerator) / c.denominator
        return acc

    def mult_matrix(self) -> list[list[Fraction]]:
        """Matrix of multiplication by self on the power basis (columns = images)."""
        d = self.parent.degree
        basis = [NFElem(self.parent, [Fraction(0)] * i + [Fraction(1)]) for i in range(d)]
        cols = [(self * b).coordinates() for b in basis]
        return [[cols[j][i] for j in range(d)] for i in range(d)]

    def norm(self) -> Fraction:
        return _det(self.mult_matrix())

    def trace(self) -> Fraction:
        m = self.mult_matrix()
        return sum((m[i][i] for i in range(len(m))), Fraction(0))

    def format(self) -> str:
        from .poly import format_dense

        return format_dense(list(self.coords), self.parent.name)

    def __repr__(self) -> str:
        return f"NFElem({self.format()} : {self.parent.min_poly_str()})"

    __str__ = format


def _poly_inverse_mod(a: list, m: list) -> list:
    # extended Euclid over Q: find s with s*a = 1 mod m
    r0, r1 = [Fraction(c) for c in m], [Fraction(c) for c in a]
    s0, s1 = [], [Fraction(1)]
    while r1:
        q, r = dense.divrem(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, dense.sub(s0, dense.mul(q, s1))
    if len(r0) != 1:
        raise ZeroDivisionError("element not invertible (minimal polynomial reducible?)")
    inv = 1 / r0[0]
    return [c * inv for c in s0]


def _det(m: list[list[Fraction]]) -> Fraction:
    a = [row[:] for row in m]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        p = a[col][col]
        det *= p
        for r in range(col + 1, n):
            f = a[r][col] / p
            if f:
                for c in range(col, n):
                    a[r][c] -= f * a[col][c]
    return det


@lru_cache(maxsize=None)
def number_field(min_poly: tuple, name: str = "t") -> NumberField:
    """Interned constructor so equal minimal polynomials share one field object."""
    return NumberField(min_poly, name)
