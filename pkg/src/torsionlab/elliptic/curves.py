"""Short Weierstrass curves Y^2 = X^3 + aX + b over QQ or a number field.

Points may have coordinates in an extension of the curve's field (for
instance a quadratic field built for a branch of a quartic); the group law
only uses field arithmetic, so mixed Fraction/NFElem operands are fine.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from ..errors import ParseError, PointNotOnCurve, SingularCurve
from ..exactalg import QQ, FieldPoly, NFElem, format_field_elem, parse_poly
from ..exactalg.fields import RationalField


@dataclass(frozen=True)
class ECPoint:
    """Affine point (X, Y), or the point at infinity when X is None."""

    X: object = None
    Y: object = None

    @property
    def is_zero(self) -> bool:
        return self.X is None

    def __neg__(self) -> "ECPoint":
        return self if self.is_zero else ECPoint(self.X, -self.Y)

    def format(self) -> str:
        if self.is_zero:
            return "O"
        return f"({_fmt(self.X)},{_fmt(self.Y)})"

    def to_dict(self) -> dict:
        if self.is_zero:
            return {"infinity": True}
        return {"X": format_field_elem(self.X), "Y": format_field_elem(self.Y)}


O = ECPoint()


def _fmt(c) -> str:
    if isinstance(c, NFElem):
        return c.format()
    return str(c)


@dataclass(frozen=True)
class ShortWeierstrass:
    a: object
    b: object
    field: object = QQ

    def __post_init__(self):
        a, b = self.field(self.a), self.field(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if not self.discriminant():
            raise SingularCurve("4a^3 + 27b^2 = 0", a=a, b=b)

    def discriminant(self):
        """4a^3 + 27b^2 (nonzero exactly when the curve is smooth)."""
        return 4 * self.a**3 + 27 * self.b**2

    def rhs(self, X):
        return X**3 + self.a * X + self.b

    def contains(self, P: ECPoint) -> bool:
        return P.is_zero or not (P.Y * P.Y - self.rhs(P.X))

    def check(self, P: ECPoint) -> ECPoint:
        if not self.contains(P):
            raise PointNotOnCurve("point is not on the curve", P=P.format(), curve=self.format())
        return P

    def point(self, X, Y) -> ECPoint:
        return self.check(ECPoint(_lift(X, self.field), _lift(Y, self.field)))

    def format(self) -> str:
        return f"a={_fmt(self.a)},b={_fmt(self.b)}"

    def to_dict(self) -> dict:
        return {"a": format_field_elem(self.a), "b": format_field_elem(self.b)}

    def embedded(self, index: int = 0) -> tuple:
        """(a, b) as complex numbers at embedding ``index``."""
        return _embed(self.a, index), _embed(self.b, index)


def _lift(c, field):
    if isinstance(c, NFElem):
        return c
    if isinstance(field, RationalField):
        return Fraction(c)
    return field(c)


def _embed(c, index: int = 0):
    if isinstance(c, NFElem):
        return c.embed(index)
    return mpmath.mpc(mpmath.mpf(Fraction(c).numerator) / Fraction(c).denominator)


def _add(a, P: ECPoint, Q: ECPoint, is_zero) -> ECPoint:
    if P.is_zero:
        return Q
    if Q.is_zero:
        return P
    if is_zero(P.X - Q.X):
        if is_zero(P.Y + Q.Y):
            return O
        lam = (3 * P.X * P.X + a) / (2 * P.Y)
    else:
        lam = (Q.Y - P.Y) / (Q.X - P.X)
    X3 = lam * lam - P.X - Q.X
    Y3 = lam * (P.X - X3) - P.Y
    return ECPoint(X3, Y3)


def _exact_zero(c) -> bool:
    return not c


def ec_add(E: ShortWeierstrass, P: ECPoint, Q: ECPoint) -> ECPoint:
    E.check(P)
    E.check(Q)
    return _add(E.a, P, Q, _exact_zero)


def ec_neg(E: ShortWeierstrass, P: ECPoint) -> ECPoint:
    return -E.check(P)


def ec_sub(E: ShortWeierstrass, P: ECPoint, Q: ECPoint) -> ECPoint:
    return ec_add(E, P, -Q)


def _mul(a, n: int, P: ECPoint, is_zero) -> ECPoint:
    if n < 0:
        return -_mul(a, -n, P, is_zero)
    result, base = O, P
    while n:
        if n & 1:
            result = _add(a, result, base, is_zero)
        n >>= 1
        if n:
            base = _add(a, base, base, is_zero)
    return result


def ec_mul(E: ShortWeierstrass, n: int, P: ECPoint) -> ECPoint:
    """[n]P by double-and-add."""
    E.check(P)
    return _mul(E.a, n, P, _exact_zero)


def torsion_order(E: ShortWeierstrass, P: ECPoint, n_max: int) -> int | None:
    """Least n <= n_max with [n]P = O (exact), else None."""
    E.check(P)
    Q = P
    for n in range(1, n_max + 1):
        if Q.is_zero:
            return n
        Q = _add(E.a, Q, P, _exact_zero)
    return None


# -- numeric group law -----------------------------------------------------


def numeric_is_zero(tol):
    return lambda c: abs(c) < tol


def numeric_add(a, P: ECPoint, Q: ECPoint, tol) -> ECPoint:
    return _add(a, P, Q, numeric_is_zero(tol))


def numeric_mul(a, n: int, P: ECPoint, tol) -> ECPoint:
    return _mul(a, n, P, numeric_is_zero(tol))


def numeric_torsion_order(a, P: ECPoint, n_max: int, tol) -> int | None:
    """Least n with [n]P = O for complex coordinates, comparing X(P_k) to X(P).

    [n]P = O  iff  [n-1]P = -P, which avoids evaluating near the pole.
    """
    if P.is_zero:
        return 1
    Q = P
    for n in range(2, n_max + 1):
        if abs(Q.X - P.X) < tol * max(1, abs(P.X)) and abs(Q.Y + P.Y) < tol * max(1, abs(P.Y)):
            return n
        Q = numeric_add(a, Q, P, tol)
        if Q.is_zero:
            return n
    return None


# -- division polynomials --------------------------------------------------

_DIV_CACHE: dict = {}
_DIV_LOCK = threading.Lock()


def _f_base(E: ShortWeierstrass, var: str) -> dict:
    K, a, b = E.field, E.a, E.b
    P = lambda cs: FieldPoly(cs, K, var)  # noqa: E731
    return {
        0: P([]),
        1: P([1]),
        2: P([2]),
        3: P([-a * a, 12 * b, 6 * a, 0, 3]),
        4: P([4 * (-8 * b * b - a**3), 4 * (-4 * a * b), 4 * (-5 * a * a), 4 * 20 * b, 4 * 5 * a, 0, 4]),
    }


def division_poly(E: ShortWeierstrass, n: int, var: str = "X") -> FieldPoly:
    """The n-th division polynomial as a polynomial in X.

    Uses the convention f_n = psi_n for odd n and f_n = psi_n / y for even n,
    so every f_n is a genuine polynomial in X after y^2 -> X^3 + aX + b.
    For n >= 2 and P != O: [n]P = O iff f_n(X(P)) = 0 (odd n), or
    y(P) * f_n(X(P)) = 0 (even n).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    key = (E, var)
    with _DIV_LOCK:
        table = _DIV_CACHE.get(key)
        if table is None:
            table = _f_base(E, var)
            _DIV_CACHE[key] = table
        if n in table:
            return table[n]
    F = FieldPoly([E.b, E.a, 0, 1], E.field, var)
    F2 = F * F
    for k in range(5, n + 1):
        if k in table:
            continue
        m = k // 2
        f = table
        if k % 2:
            if m % 2 == 0:
                val = F2 * f[m + 2] * f[m] ** 3 - f[m - 1] * f[m + 1] ** 3
            else:
                val = f[m + 2] * f[m] ** 3 - F2 * f[m - 1] * f[m + 1] ** 3
        else:
            inner = f[m + 2] * f[m - 1] ** 2 - f[m - 2] * f[m + 1] ** 2
            val = f[m] * inner * Fraction(1, 2)
        with _DIV_LOCK:
            table.setdefault(k, val)
    return table[n]


# -- text format -----------------------------------------------------------

_CURVE_RE = re.compile(r"^\s*a\s*=\s*([^,;]+)\s*,\s*b\s*=\s*([^;]+?)\s*(?:;\s*P\s*=\s*\((.*)\)\s*)?$")


def parse_curve_point(text: str, field=QQ) -> tuple[ShortWeierstrass, ECPoint | None]:
    """Parse ``"a=-1,b=1; P=(0,-1)"`` (the point part is optional)."""
    m = _CURVE_RE.match(text)
    if not m:
        raise ParseError(f"malformed curve text: {text!r}")
    def val(s):
        # constants only; number-field generators are written in their own name (e.g. t)
        p = parse_poly(s, field, "x")
        if p.degree > 0:
            raise ParseError(f"not a field constant: {s!r}")
        return p[0] if p.degree == 0 else field.zero

    E = ShortWeierstrass(val(m.group(1)), val(m.group(2)), field)
    if m.group(3) is None:
        return E, None
    parts = m.group(3).split(",")
    if len(parts) != 2:
        raise ParseError(f"point needs two coordinates: {text!r}")
    return E, E.point(val(parts[0]), val(parts[1]))


def format_curve_point(E: ShortWeierstrass, P: ECPoint | None = None) -> str:
    s = E.format()
    return s if P is None else f"{s}; P={P.format()}"
