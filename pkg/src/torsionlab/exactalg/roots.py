"""Certified complex root extraction and small-denominator recognition."""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import Sequence

import mpmath

from ..errors import PrecisionExhausted
from .fields import NFElem

log = logging.getLogger(__name__)

# precision ladder multipliers applied to the doubled working precision
LADDER = (1, 2, 4)


def _to_mpc(c, index: int = 0):
    if isinstance(c, NFElem):
        return c.embed(index)
    if isinstance(c, Fraction):
        return mpmath.mpc(mpmath.mpf(c.numerator) / c.denominator)
    if isinstance(c, int):
        return mpmath.mpc(c)
    return mpmath.mpc(c)


def _aberth(coeffs: list, max_iter: int) -> list:
    """Aberth-Ehrlich iteration on a monic coefficient list (low degree first)."""
    n = len(coeffs) - 1
    dcoeffs = [coeffs[i] * i for i in range(1, n + 1)]
    # Fujiwara-style radius for the starting circle
    radius = 2 * max(abs(coeffs[n - k]) ** (mpmath.mpf(1) / k) for k in range(1, n + 1))
    radius = max(radius, mpmath.mpf("1e-3"))
    zs = [radius * mpmath.expj(2 * mpmath.pi * k / n + mpmath.mpf("0.4")) for k in range(n)]
    eps = mpmath.mpf(2) ** (-mpmath.mp.prec + 8)
    for _ in range(max_iter):
        biggest = 0
        for k in range(n):
            z = zs[k]
            p = mpmath.polyval(coeffs[::-1], z)
            if p == 0:
                continue
            dp = mpmath.polyval(dcoeffs[::-1], z)
            ratio = p / dp if dp != 0 else mpmath.mpc(eps)
            s = mpmath.fsum(1 / (z - zs[j]) for j in range(n) if j != k and zs[j] != z)
            denom = 1 - ratio * s
            w = ratio / denom if denom != 0 else ratio
            zs[k] = z - w
            rel = abs(w) / max(1, abs(zs[k]))
            biggest = max(biggest, rel)
        if biggest < eps:
            break
    return zs


def complex_roots_dense(coeffs: Sequence, prec: int, index: int = 0) -> list:
    """Roots (with multiplicity) of a dense coefficient list, low degree first.

    Every returned root r satisfies |f(r)| < 10^(-prec+10) * max|coeff|.  The
    iteration runs at twice ``prec`` digits and retries at 2x and 4x that
    before raising :class:`PrecisionExhausted`.
    """
    if prec < 15:
        raise ValueError("prec must be >= 15")
    raw = list(coeffs)
    while raw and not raw[-1]:
        raw.pop()
    if not raw:
        raise ValueError("zero polynomial has no finite root set")
    n = len(raw) - 1
    if n == 0:
        return []
    real_input = not any(isinstance(c, NFElem) and not c.is_rational() for c in raw) and not any(
        isinstance(c, (complex, mpmath.mpc)) and mpmath.im(c) != 0 for c in raw
    )
    for mult in LADDER:
        wp = 2 * prec * mult
        with mpmath.workdps(wp):
            cs = [_to_mpc(c, index) for c in raw]
            scale = max(abs(c) for c in cs)
            lead = cs[-1]
            monic = [c / lead for c in cs]
            # strip exact zero roots first so the iteration only sees the rest
            zeros = 0
            while monic[zeros] == 0:
                zeros += 1
            rest = monic[zeros:]
            roots = [mpmath.mpc(0)] * zeros
            if len(rest) > 1:
                roots += _aberth(rest, max_iter=60 * (len(rest) + 10) * mult)
            tol = mpmath.mpf(10) ** (-prec + 10) * scale
            ok = all(abs(mpmath.polyval(cs[::-1], r)) < tol for r in roots)
            if ok:
                if real_input:
                    snap = mpmath.mpf(10) ** (-prec)
                    roots = [
                        mpmath.mpc(mpmath.re(r), 0) if abs(mpmath.im(r)) < snap * max(1, abs(r)) else r
                        for r in roots
                    ]
                return roots
        log.debug("root certification failed at %d digits; escalating", wp)
    raise PrecisionExhausted("root certification failed", degree=n, prec=prec)


def complex_roots(f, prec: int = 50, embedding: int = 0) -> list:
    """Roots of a FieldPoly (coefficients embedded via ``embedding`` for number fields)."""
    if f.is_zero():
        raise ValueError("zero polynomial has no finite root set")
    return complex_roots_dense(list(f.coeffs), prec, embedding)


def sort_roots(roots: list, prec: int) -> list:
    """Real roots ascending, then non-real roots by (real, imaginary) part."""
    tol = mpmath.mpf(10) ** (-(prec // 2))
    real = sorted((r for r in roots if abs(mpmath.im(r)) <= tol), key=lambda r: mpmath.re(r))
    cplx = sorted(
        (r for r in roots if abs(mpmath.im(r)) > tol), key=lambda r: (mpmath.re(r), mpmath.im(r))
    )
    return real + cplx


def rational_recognize(x, m_max: int, tol) -> tuple[int, int] | None:
    """Smallest-denominator k/m (m <= m_max) with |x - k/m| < tol, or None.

    Among fractions with the winning denominator the nearest one is returned;
    the result is automatically in lowest terms.
    """
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    if isinstance(x, Fraction):
        x = mpmath.mpf(x.numerator) / x.denominator
    x = mpmath.mpf(x)
    tol = mpmath.mpf(tol)
    for m in range(1, m_max + 1):
        k = int(mpmath.nint(x * m))
        if abs(x - mpmath.mpf(k) / m) < tol:
            return k, m
    return None
