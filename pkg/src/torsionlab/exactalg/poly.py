"""Dense univariate polynomials over QQ or a number field.

Text format: ``"x^4+x+1/4"``; coefficients from a number field are written in
the generator, parenthesized when they are not a single term, e.g.
``"(2*t+1/3)*x^2+t"``.
"""

from __future__ import annotations

import ast
from fractions import Fraction
from typing import Iterable, Sequence

from . import dense
from .fields import QQ, NFElem, NumberField, RationalField, format_rational, rational_sqrt
from ..errors import (
    DivideByZeroPoly,
    FieldMismatch,
    NonSquareLeadingCoeff,
    OddDegree,
    ParseError,
)

Field = RationalField | NumberField


class FieldPoly:
    """Immutable dense polynomial, coefficients lowest degree first."""

    __slots__ = ("field", "coeffs", "var")

    def __init__(self, coeffs: Iterable = (), field: Field = QQ, var: str = "x"):
        self.field = field
        self.var = var
        self.coeffs = tuple(dense.trim([field(c) for c in coeffs]))

    @classmethod
    def _raw(cls, coeffs: list, field: Field, var: str = "x") -> "FieldPoly":
        p = object.__new__(cls)
        p.field = field
        p.var = var
        p.coeffs = tuple(dense.trim([field(c) for c in coeffs]))
        return p

    @classmethod
    def monomial(cls, n: int, c=1, field: Field = QQ, var: str = "x") -> "FieldPoly":
        return cls([0] * n + [c], field, var)

    @classmethod
    def x(cls, field: Field = QQ, var: str = "x") -> "FieldPoly":
        return cls.monomial(1, 1, field, var)

    @classmethod
    def parse(cls, text: str, field: Field = QQ, var: str = "x") -> "FieldPoly":
        return parse_poly(text, field, var)

    # -- basic queries ------------------------------------------------------
    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def lc(self):
        return self.coeffs[-1] if self.coeffs else self.field.zero

    def __getitem__(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.field.zero

    def __len__(self) -> int:
        return len(self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    # -- arithmetic ---------------------------------------------------------
    def _other(self, other) -> "FieldPoly":
        if isinstance(other, FieldPoly):
            if other.field != self.field:
                raise FieldMismatch("polynomials over different fields", left=self.field, right=other.field)
            return other
        return FieldPoly._raw([self.field(other)], self.field, self.var)

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldPoly):
            return self.field == other.field and self.coeffs == other.coeffs
        try:
            return self.coeffs == self._other(other).coeffs
        except (TypeError, FieldMismatch):
            return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field, self.coeffs))

    def __neg__(self):
        return FieldPoly._raw(dense.neg(self.coeffs), self.field, self.var)

    def __add__(self, other):
        o = self._other(other)
        return FieldPoly._raw(dense.add(self.coeffs, o.coeffs), self.field, self.var)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return FieldPoly._raw(dense.sub(self.coeffs, o.coeffs), self.field, self.var)

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        if not isinstance(other, FieldPoly):
            c = self.field(other)
            return FieldPoly._raw(dense.scale(self.coeffs, c), self.field, self.var)
        o = self._other(other)
        return FieldPoly._raw(dense.mul(self.coeffs, o.coeffs), self.field, self.var)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative polynomial power")
        result = FieldPoly._raw([self.field.one], self.field, self.var)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divrem(self, other) -> tuple["FieldPoly", "FieldPoly"]:
        return poly_divrem(self, other)

    def __divmod__(self, other):
        return poly_divrem(self, other)

    def __floordiv__(self, other):
        return poly_divrem(self, other)[0]

    def __mod__(self, other):
        return poly_divrem(self, other)[1]

    def exact_div(self, other) -> "FieldPoly":
        q, r = poly_divrem(self, other)
        if r:
            raise ArithmeticError("division is not exact")
        return q

    def monic(self) -> "FieldPoly":
        if not self.coeffs:
            return self
        return self * dense.inverse(self.lc())

    def derivative(self) -> "FieldPoly":
        return FieldPoly._raw(dense.derivative(self.coeffs), self.field, self.var)

    def __call__(self, x):
        return dense.evaluate(self.coeffs, x)

    def evaluate_embedded(self, x, index: int = 0):
        """Evaluate at a complex number ``x`` using embedding ``index`` of the coefficients."""
        import mpmath

        acc = mpmath.mpc(0)
        for c in reversed(self.coeffs):
            acc = acc * x + embed_coeff(c, index)
        return acc

    def translate(self, c) -> "FieldPoly":
        """The polynomial x -> self(x + c)."""
        c = self.field(c)
        shift = FieldPoly._raw([c, self.field.one], self.field, self.var)
        acc = FieldPoly._raw([], self.field, self.var)
        for coef in reversed(self.coeffs):
            acc = acc * shift + coef
        return acc

    def map_coeffs(self, f, field: Field | None = None) -> "FieldPoly":
        field = field or self.field
        return FieldPoly([f(c) for c in self.coeffs], field, self.var)

    def max_bits(self) -> int:
        return max((self.field.bit_size(c) for c in self.coeffs), default=0)

    # -- formatting ---------------------------------------------------------
    def __str__(self) -> str:
        return format_dense(list(self.coeffs), self.var)

    def __repr__(self) -> str:
        return f"FieldPoly({self}, field={self.field!r})"


def embed_coeff(c, index: int = 0):
    import mpmath

    if isinstance(c, NFElem):
        return c.embed(index)
    return mpmath.mpf(c.numerator) / c.denominator


def _check(a: FieldPoly, b: FieldPoly) -> None:
    if a.field != b.field:
        raise FieldMismatch("polynomials over different fields", left=a.field, right=b.field)


def poly_divrem(a: FieldPoly, b: FieldPoly) -> tuple[FieldPoly, FieldPoly]:
    """Exact division with remainder: a = q*b + r, deg r < deg b."""
    if not isinstance(b, FieldPoly):
        b = a._other(b)
    _check(a, b)
    if b.is_zero():
        raise DivideByZeroPoly("division by the zero polynomial")
    q, r = dense.divrem(list(a.coeffs), list(b.coeffs))
    return FieldPoly._raw(q, a.field, a.var), FieldPoly._raw(r, a.field, a.var)


def poly_gcd(a: FieldPoly, b: FieldPoly) -> FieldPoly:
    """Monic gcd (zero if both inputs are zero)."""
    _check(a, b)
    while b:
        a, b = b, poly_divrem(a, b)[1]
    return a.monic()


def poly_xgcd(a: FieldPoly, b: FieldPoly) -> tuple[FieldPoly, FieldPoly, FieldPoly]:
    """Return (g, s, t) with s*a + t*b = g, g monic."""
    _check(a, b)
    zero = FieldPoly._raw([], a.field, a.var)
    one = FieldPoly._raw([a.field.one], a.field, a.var)
    r0, r1, s0, s1, t0, t1 = a, b, one, zero, zero, one
    while r1:
        q, r = poly_divrem(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if not r0:
        return r0, s0, t0
    inv = dense.inverse(r0.lc())
    return r0 * inv, s0 * inv, t0 * inv


def is_squarefree(f: FieldPoly) -> bool:
    if f.degree <= 0:
        return True
    return poly_gcd(f, f.derivative()).degree == 0


def squarefree_part(f: FieldPoly) -> FieldPoly:
    """Product of the distinct irreducible factors of f (monic), in characteristic 0."""
    if f.degree <= 0:
        return f.monic() if f else f
    g = poly_gcd(f, f.derivative())
    return poly_divrem(f, g)[0].monic()


def field_sqrt(field: Field, c):
    if isinstance(field, RationalField):
        return rational_sqrt(field(c))
    return field.sqrt(c)


def poly_sqrt_floor(D: FieldPoly) -> FieldPoly:
    """Polynomial part of the Laurent expansion of sqrt(D) in 1/x.

    Returns A with deg A = deg D / 2 and deg(D - A^2) < deg D / 2, using the
    branch whose leading coefficient is the field square root of lc(D).
    Computed by Newton iteration on the reversed series.
    """
    n = D.degree
    if n < 0 or n % 2:
        raise OddDegree("sqrt floor needs even degree", degree=n)
    field = D.field
    c = field_sqrt(field, D.lc())
    if c is None:
        raise NonSquareLeadingCoeff("leading coefficient is not a square", lc=D.lc())
    h = n // 2
    # reversed series: D(x)/x^n = lc * (1 + ...) in w = 1/x; need h+1 terms of its sqrt
    rev = [D[n - i] for i in range(h + 1)]
    s = [c]
    prec = 1
    half = Fraction(1, 2)
    while prec < h + 1:
        prec = min(2 * prec, h + 1)
        # s <- (s + rev/s) / 2 truncated to prec terms
        inv = _series_inverse(s, prec)
        quo = dense.mul(rev[:prec], inv)[:prec]
        quo += [0] * (prec - len(quo))
        s = s + [0] * (prec - len(s))
        s = [(s[i] + quo[i]) * half for i in range(prec)]
    # A(x) = sum s_i x^(h-i)
    A = FieldPoly([s[h - j] for j in range(h + 1)], field, D.var)
    return A


def _series_inverse(s: list, prec: int) -> list:
    inv0 = dense.inverse(s[0])
    out = [inv0]
    for k in range(1, prec):
        acc = 0
        for j in range(1, min(k, len(s) - 1) + 1):
            acc = acc + s[j] * out[k - j]
        out.append(-acc * inv0)
    return out


# -- text format ---------------------------------------------------------


def _format_coeff(c) -> tuple[str, bool]:
    """Return (text, needs_parentheses_as_a_factor)."""
    if isinstance(c, NFElem):
        return c.format(), sum(1 for x in c.coords if x) > 1
    return format_rational(Fraction(c)), False


def format_dense(coeffs: Sequence, var: str = "x") -> str:
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if not c:
            continue
        ctxt, compound = _format_coeff(c)
        if i == 0:
            body = ctxt
        else:
            mono = var if i == 1 else f"{var}^{i}"
            if compound:
                body = f"({ctxt})*{mono}"
            elif ctxt == "1":
                body = mono
            elif ctxt == "-1":
                body = f"-{mono}"
            else:
                body = f"{ctxt}*{mono}"
        terms.append(body)
    if not terms:
        return "0"
    out = terms[0]
    for t in terms[1:]:
        out += t if t.startswith("-") else "+" + t
    return out


def parse_poly(text: str, field: Field = QQ, var: str = "x") -> FieldPoly:
    """Parse a polynomial in ``var``; a number field's generator name is also allowed."""
    try:
        tree = ast.parse(text.replace("^", "**").strip(), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse polynomial {text!r}") from exc
    gen_name = field.name if isinstance(field, NumberField) else None

    def const(c) -> FieldPoly:
        return FieldPoly._raw([field(c)] if c else [], field, var)

    def walk(node) -> FieldPoly:
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return const(node.value)
        if isinstance(node, ast.Name):
            if node.id == var:
                return FieldPoly._raw([field.zero, field.one], field, var)
            if gen_name is not None and node.id == gen_name:
                return FieldPoly._raw([field.gen()], field, var)
            raise ParseError(f"unknown symbol {node.id!r} in {text!r}")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = walk(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            left = walk(node.left)
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                    raise ParseError(f"exponent must be a non-negative integer in {text!r}")
                return left ** node.right.value
            right = walk(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                if not right.is_constant() or right.is_zero():
                    raise ParseError(f"division by non-constant or zero in {text!r}")
                return left * dense.inverse(right.lc())
        raise ParseError(f"unsupported syntax in {text!r}")

    return walk(tree)


def parse_nf_elem(text: str, name: str = "t") -> NFElem | Fraction:
    """Parse ``"minpoly : element"`` (e.g. ``"t^2+1 : 2*t+1/3"``) or a bare rational."""
    from .fields import number_field

    if ":" not in text:
        p = parse_poly(text, QQ, name)
        if p.degree > 0:
            raise ParseError(f"element {text!r} needs a minimal polynomial ('m(t) : elem')")
        return p[0]
    mp_txt, el_txt = text.split(":", 1)
    m = parse_poly(mp_txt, QQ, name)
    K = number_field(m.coeffs, name)
    e = parse_poly(el_txt, QQ, name)
    return K(list(e.coeffs))


def format_field_elem(c) -> str:
    if isinstance(c, NFElem):
        return f"{c.parent.min_poly_str()} : {c.format()}"
    return format_rational(Fraction(c))
