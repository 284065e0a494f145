"""Text and JSON encodings for arbitrary-precision numbers."""

from __future__ import annotations


import mpmath

from .errors import ParseError



def fmt_real(x, digits: int = 30) -> str:
    return mpmath.nstr(mpmath.mpf(x), digits, min_fixed=-5, max_fixed=5)


def fmt_complex(z, digits: int = 30) -> str:
    """``re+im*i`` with both parts always present."""
    z = mpmath.mpc(z)
    re_s = fmt_real(z.real, digits)
    im = z.imag
    sign = "-" if im < 0 else "+"
    return f"{re_s}{sign}{fmt_real(abs(im), digits)}*i"


def parse_complex(text: str):
    text = text.strip().replace(" ", "")
    if text.endswith("*i") or text.endswith("i"):
        body = text[:-2] if text.endswith("*i") else text[:-1]
        # split at the last sign that is not part of an exponent
        for k in range(len(body) - 1, 0, -1):
            if body[k] in "+-" and body[k - 1] not in "eE":
                try:
                    return mpmath.mpc(mpmath.mpf(body[:k]), mpmath.mpf(body[k:]))
                except (ValueError, TypeError):
                    break
        try:
            return mpmath.mpc(0, mpmath.mpf(body or "1"))
        except (ValueError, TypeError) as exc:
            raise ParseError(f"not a complex number: {text!r}") from exc
    try:
        return mpmath.mpc(mpmath.mpf(text))
    except (ValueError, TypeError) as exc:
        raise ParseError(f"not a complex number: {text!r}") from exc
