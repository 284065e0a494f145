"""Exact arithmetic over Q and number fields, polynomials, and root extraction."""

from .fields import QQ, NFElem, NumberField, Rational, number_field, to_rational
from .poly import (
    FieldPoly,
    format_field_elem,
    is_squarefree,
    parse_nf_elem,
    parse_poly,
    poly_divrem,
    poly_gcd,
    poly_sqrt_floor,
    poly_xgcd,
    squarefree_part,
)
from .roots import complex_roots, rational_recognize, sort_roots
from .factor import factor_poly_qq, is_irreducible_qq, nf_sqrt

__all__ = [
    "QQ",
    "NFElem",
    "NumberField",
    "Rational",
    "number_field",
    "to_rational",
    "FieldPoly",
    "format_field_elem",
    "is_squarefree",
    "parse_nf_elem",
    "parse_poly",
    "poly_divrem",
    "poly_gcd",
    "poly_sqrt_floor",
    "poly_xgcd",
    "squarefree_part",
    "complex_roots",
    "rational_recognize",
    "sort_roots",
    "factor_poly_qq",
    "is_irreducible_qq",
    "nf_sqrt",
]
