"""Ribet sections on the lemniscatic curve and the torsion-lift counts.

The constant curve E0: y^2 = 4x^3 - 4x (g2 = 4, g3 = 0, CM by Z[i]) carries
the extension with v = alpha u, alpha = 2i.  Over each primitive n-torsion
point u the Ribet point is tested for torsion, and so is a perturbed point
whose G_m-coordinate is multiplied by h(wp(u)) = wp(u)^2 + 3, a section that
depends on the x-coordinate and is not a unit.
"""

from __future__ import annotations

from collections import Counter

import mpmath

from ..config import Config
from ..elliptic import ECPoint, numeric_torsion_order, torsion_count, torsion_parameters
from ..elliptic.family import SINGULAR_LOCUS, psi_at_P
from ..errors import PoleProximity, TorsionZeroQ
from ..exactalg import complex_roots, poly_gcd, squarefree_part
from ..lattice import periods, wp
from ..numfmt import fmt_complex, fmt_real
from ..semiabelian import (
    GBetti,
    betti_g,
    g_log,
    primitive_torsion,
    recognize_betti,
    ribet_betti_closed,
    ribet_order_check,
    ribet_point,
)
from .report import ScanReport, run_rows

ALPHA = 2j
LEMNISCATIC = (4, 0)
GUARD = 15


def perturbation(x):
    """h(x) = x^2 + 3: a non-unit function of the x-coordinate."""
    return x * x + 3


def generic_betti(L, alpha, k1: int, k2: int, n: int) -> tuple[GBetti, str]:
    """Betti coordinates of the perturbed point over u = (k1 omega1 + k2 omega2)/n.

    Uses the full logarithm where it is defined; where sigma(v) or
    sigma(u + v) vanishes the closed form is shifted by log h / (2 pi i).
    """
    b1, b2 = mpmath.mpf(k1) / n, mpmath.mpf(k2) / n
    u = b1 * L.omega1 + b2 * L.omega2
    try:
        ext, s, _rv = ribet_point(L, alpha, u, perturb=perturbation)
        return betti_g(ext, g_log(ext, s, u)), "full"
    except (PoleProximity, TorsionZeroQ):
        B = ribet_betti_closed(L, alpha, b1, b2)
        shift = mpmath.log(perturbation(wp(L, u)[0])) / (2j * mpmath.pi)
        return GBetti(B.a + shift, B.b1, B.b2, B.prec), "closed+shift"


def _betti_text(B: GBetti) -> dict:
    return {"a": fmt_complex(B.a, 30), "b1": fmt_real(B.b1, 30), "b2": fmt_real(B.b2, 30)}


def ribet_row(item: dict) -> dict:
    prec, n, (k1, k2) = item["prec"], item["n"], item["k"]
    row = dict(item)
    with mpmath.workdps(prec + GUARD):
        L = periods(*LEMNISCATIC, prec)
        chk = ribet_order_check(L, ALPHA, k1, k2, n, cross_check=item.get("cross_check", True))
        B = chk.betti
        rec = B.recognized
        # (1/n^2) Z x (1/n) Z^2 membership of (a, b1, b2)
        row["in_lattice"] = (n * n * rec["k0"]) % rec["m"] == 0 and all((n * rec[k]) % rec["m"] == 0 for k in ("k1", "k2"))
        row.update({"m": chk.m, "divides_n2": chk.divides_n2, "full_agrees": chk.full_agrees,
                    "betti": _betti_text(B), "recognized": rec})
        G, method = generic_betti(L, ALPHA, k1, k2, n)
        grec = recognize_betti(G, n * n)
        row["generic"] = {"lifts": grec is not None, "m": None if grec is None else grec["m"],
                          "method": method, "imag_a": fmt_real(mpmath.im(G.a), 10)}
        row["certificate"] = {"kind": "ribet", "g2": "4", "g3": "0", "alpha": "2*i", "n": n, "k1": k1, "k2": k2,
                              "prec": prec, "m": chk.m, "a": row["betti"]["a"], "generic_lifts": grec is not None}
    return row


def _items(n_values, prec, cross_check=True):
    return [{"n": n, "k": list(k), "prec": prec, "cross_check": cross_check}
            for n in n_values for k in primitive_torsion(n)]


def ribet_scan(n_max: int, config: Config | None = None, jobs: int | None = 1, prec: int | None = None) -> ScanReport:
    """Order of the Ribet point over every primitive n-torsion point, 2 <= n <= n_max."""
    if n_max < 3:
        raise ValueError("n_max must be >= 3")
    config = config or Config()
    prec = prec or config.precision_digits
    rows = run_rows(ribet_row, _items(range(2, n_max + 1), prec), jobs)
    good = [r for r in rows if "error" not in r]
    orders = {}
    for r in good:
        orders.setdefault(str(r["n"]), Counter())[str(r["m"])] += 1
    summary = {
        "points": len(rows),
        "recognition_failed": sum(1 for r in rows if "error" in r),
        "orders_by_n": {n: dict(sorted(c.items(), key=lambda kv: int(kv[0]))) for n, c in orders.items()},
        "fraction_divides_n2": sum(r["divides_n2"] for r in good) / len(rows) if rows else None,
        "fraction_in_lattice": sum(r["in_lattice"] for r in good) / len(rows) if rows else None,
        "full_log_disagreements": sum(1 for r in good if r["full_agrees"] is False),
        "perturbed_lifts": sum(r["generic"]["lifts"] for r in good),
        "perturbation_breaks_torsion": any(not r["generic"]["lifts"] for r in good),
    }
    params = {"n_max": n_max, "alpha": "2*i", "g2": "4", "g3": "0"}
    return ScanReport("ribet", params, rows, summary, config.provenance(precision_digits=prec))


# -- lift counts ----------------------------------------------------------------


def _quartic_row(item: dict) -> dict:
    """|S_m^E| for x^4 + x + lam: the degree count against a direct root count."""
    m, prec = item["m"], item["prec"]
    row = dict(item)
    row["S_m_E"] = torsion_count(m)
    row["orbit_degrees"] = [tp.degree for tp in torsion_parameters(m, prec=prec)]
    # independent count: roots of the uncleaned condition where P has exact order m
    cond = psi_at_P(m)
    exact = 0
    if cond.degree > 0:
        cond = squarefree_part(cond)
        sing = poly_gcd(cond, SINGULAR_LOCUS)
        if sing.degree > 0:
            cond = cond // sing
        with mpmath.workdps(prec):
            tol = mpmath.mpf(10) ** (-(prec // 3))
            P = ECPoint(mpmath.mpc(0), mpmath.mpc(-1))
            exact = sum(numeric_torsion_order(-4 * lam, P, m, tol) == m for lam in complex_roots(cond, prec))
    row["root_count"] = exact
    row["counts_agree"] = exact == row["S_m_E"]
    row["ribet_lifts"] = row["generic_lifts"] = None
    row["note"] = "no Ribet section: E_lam is neither constant nor CM"
    return row


def surface_count(family_id: str = "lemniscatic", m_max: int = 8, config: Config | None = None,
                  jobs: int | None = 1) -> ScanReport:
    """Torsion-lift counts per m for the Ribet configuration and the perturbed section.

    ``family_id="lemniscatic"``: S_m^E is the primitive m-torsion of E0 and
    both sections are tested on it.  ``family_id="quartic"``: |S_m^E| for
    the family x^4 + x + lam, counted two ways; no lift data.
    """
    if m_max < 2:
        raise ValueError("m_max must be >= 2")
    config = config or Config()
    prec = config.precision_digits
    if family_id == "quartic":
        rows = run_rows(_quartic_row, [{"m": m, "prec": prec} for m in range(2, m_max + 1)], jobs)
        summary = {
            "S_m_E": {str(r["m"]): r.get("S_m_E") for r in rows},
            "counts_agree": all(r.get("counts_agree") for r in rows),
        }
    elif family_id == "lemniscatic":
        rows = run_rows(ribet_row, _items(range(2, m_max + 1), prec, cross_check=False), jobs)
        hist = {}
        for r in rows:
            h = hist.setdefault(str(r["n"]), {"S_m_E": 0, "ribet_lifts": 0, "generic_lifts": 0, "errors": 0})
            h["S_m_E"] += 1
            if "error" in r:
                h["errors"] += 1
                continue
            # Ribet lift: recognized with denominator <= m^2
            h["ribet_lifts"] += r["m"] <= r["n"] ** 2
            h["generic_lifts"] += r["generic"]["lifts"]
        for h in hist.values():
            h["ribet_fraction"] = h["ribet_lifts"] / h["S_m_E"]
            h["generic_fraction"] = h["generic_lifts"] / h["S_m_E"]
        total = len(rows)
        summary = {
            "histogram": hist,
            "ribet_fraction": sum(h["ribet_lifts"] for h in hist.values()) / total,
            "generic_fraction": sum(h["generic_lifts"] for h in hist.values()) / total,
        }
    else:
        raise ValueError(f"unknown family_id {family_id!r} (expected 'lemniscatic' or 'quartic')")
    params = {"family_id": family_id, "m_max": m_max}
    return ScanReport("surface", params, rows, summary, config.provenance())
