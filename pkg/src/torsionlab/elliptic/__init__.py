"""Elliptic curves: exact group law, division polynomials, the quartic family."""

from .curves import (
    O,
    ECPoint,
    ShortWeierstrass,
    division_poly,
    ec_add,
    ec_mul,
    ec_neg,
    ec_sub,
    format_curve_point,
    numeric_torsion_order,
    parse_curve_point,
    torsion_order,
)
from .family import (
    TorsionParameter,
    family_curve,
    family_point,
    order_condition,
    psi_at_P,
    torsion_count,
    torsion_parameters,
)
from .quartic import (
    QuarticModel,
    RhoCaseII,
    abel_jacobi,
    divisor_class,
    quartic_coefficients,
    quartic_jacobian,
    rho_case_ii,
    three_torsion_points,
)
