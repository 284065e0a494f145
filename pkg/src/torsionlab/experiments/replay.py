"""Re-check a single row from its stored certificate.

Exact certificates are reproduced bit-for-bit; numeric ones within their
recorded tolerance.
"""

from __future__ import annotations

import mpmath

from ..elliptic import family_curve, family_point, rho_case_ii, torsion_order
from ..exactalg import FieldPoly, format_field_elem, parse_poly
from ..lattice import periods
from ..numfmt import parse_complex
from ..pell import PellSolution, cf_expand, pell_fundamental, pell_values_at
from ..semiabelian import recognize_betti, ribet_order_check
from .report import lam_parse, quartic_of
from .ribet import ALPHA, LEMNISCATIC, generic_betti


def _pell_cf(c: dict) -> dict:
    lam, K = lam_parse(c["lam"])
    D = quartic_of(lam, K)
    checks = {}
    if c["verdict"] == "solvable":
        # the stored pair is checked directly, then regenerated
        sol = PellSolution(parse_poly(c["X"], K, "x"), parse_poly(c["Y"], K, "x"))
        checks["identity"] = sol.check(D)
        fresh = pell_fundamental(D, c["cf_budget"], bit_cap=c["bit_cap"])
        checks["regenerated"] = fresh is not None and (str(fresh.X), str(fresh.Y)) == (c["X"], c["Y"])
    else:
        cf = cf_expand(D, c["cf_budget"], bit_cap=c["bit_cap"])
        checks["still_inconclusive"] = not cf.periodic
    if "nontorsion_bound" in c:
        order = torsion_order(family_curve(lam), family_point(lam), c["nontorsion_bound"])
        checks["nontorsion"] = (order is None) == c["nontorsion_ok"]
    return checks


def _squared_exact(c: dict) -> dict:
    lam, K = lam_parse(c["lam"])
    D = quartic_of(lam, K)
    sol = pell_fundamental(D, c["cf_budget"], bit_cap=c["bit_cap"])
    ys = [format_field_elem(y) for _k, _x, y in pell_values_at(sol, D, K(0), c["k_max"])]
    hit = next((k for k, y in enumerate(ys, 1) if y == "0"), None)
    return {"Y_values": ys == c["Y_values"], "hit": hit == c["hit"]}


def _squared_numeric(c: dict) -> dict:
    from .squared_factor import GUARD, _numeric_scan

    lam, K = lam_parse(c["lam"])
    prec, j = c["prec"], c["embedding"]
    with mpmath.workdps(prec + GUARD):
        r = rho_case_ii(lam, c["m_choice"], None, prec, embedding=j)
        tol = mpmath.mpf(10) ** (-(prec // 2))
        checks = {
            "rho": abs(r.rho - parse_complex(c["rho"])) < mpmath.mpf(10) ** -25,
            "q_order": r.q_order == c["q_order"],
        }
        if "hit" in c:
            sol = pell_fundamental(quartic_of(lam, K), c["cf_budget"], bit_cap=c["bit_cap"])
            hit, best = _numeric_scan(sol, quartic_of(lam, K), r.rho, j, c["k_max"], tol)
            checks["hit"] = hit == c["hit"]
            checks["min_relative_Y"] = abs(best - mpmath.mpf(c["min_relative_Y"])) <= mpmath.mpf(10) ** -8 * max(1, best)
    return checks


def _ribet(c: dict) -> dict:
    prec = c["prec"]
    with mpmath.workdps(prec + 15):
        L = periods(*LEMNISCATIC, prec)
        chk = ribet_order_check(L, ALPHA, c["k1"], c["k2"], c["n"], cross_check=False)
        a = parse_complex(c["a"])
        G, _ = generic_betti(L, ALPHA, c["k1"], c["k2"], c["n"])
        return {
            "m": chk.m == c["m"],
            "a": abs(chk.betti.a - a) < mpmath.mpf(10) ** -25,
            "generic": (recognize_betti(G, c["n"] ** 2) is not None) == c["generic_lifts"],
        }


_KINDS = {
    "pell_cf": _pell_cf,
    "squared_exact": _squared_exact,
    "squared_numeric": _squared_numeric,
    "ribet": _ribet,
}


def replay(certificate: dict) -> dict:
    """{"kind", "ok", "checks"} for a stored certificate (or a whole row holding one)."""
    cert = certificate.get("certificate", certificate)
    kind = cert.get("kind")
    if kind not in _KINDS:
        raise ValueError(f"unknown certificate kind {kind!r}")
    checks = _KINDS[kind](cert)
    return {"kind": kind, "ok": all(checks.values()), "checks": checks}
