"""Squared-factor Pell equations X^2 - (x - rho)^2 Q_lam Y^2 = 1 over torsion parameters.

Case i takes rho = 0 and evaluates Y_k(0) exactly in the field of lam.  Case
ii takes the numeric rho(lam) of :func:`rho_case_ii` at each complex
embedding and tests |Y_k(rho)| against a tolerance; its certificates are
therefore tolerance-tagged rather than exact.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath

from ..config import Config
from ..elliptic import rho_case_ii, torsion_parameters
from ..errors import PellUnsolvable, RhoOnCurveBranch
from ..exactalg import format_field_elem
from ..numfmt import fmt_complex, fmt_real
from ..pell import pell_fundamental, pell_values_at, squared_factor_solution
from .report import ScanReport, lam_parse, lam_text, quartic_of, run_rows

EXPERIMENT_ID = "theorem4"
GUARD = 15

NOTE = (
    "Finiteness evidence only: a hit set that stays fixed as k_max grows is "
    "consistent with, but does not prove, finiteness over all complex lam."
)


def _solution(D, item):
    sol = pell_fundamental(D, item["cf_budget"], bit_cap=item["bit_cap"])
    if sol is None:
        raise PellUnsolvable("no fundamental solution within budget", lam=item["lam"])
    return sol


def case_i_row(item: dict) -> dict:
    lam, K = lam_parse(item["lam"])
    D = quartic_of(lam, K)
    rho = K(0)
    if not D(rho):
        raise RhoOnCurveBranch("rho = 0 is a root of Q_lam", lam=item["lam"])
    sol = _solution(D, item)
    ys, hit = [], None
    for k, _x, y in pell_values_at(sol, D, rho, item["k_max"]):
        ys.append(format_field_elem(y))
        if hit is None and not y:
            hit = k
    row = dict(item)
    row["hit"] = hit
    if hit is not None:
        # an exact hit must give an honest solution of the squared-factor equation
        sq = squared_factor_solution(rho, D, hit, sol)
        row["squared_solution"] = {"X": str(sq.X), "Y": str(sq.Y)}
    row["certificate"] = {"kind": "squared_exact", "lam": item["lam"], "rho": "0", "k_max": item["k_max"],
                          "cf_budget": item["cf_budget"], "bit_cap": item["bit_cap"], "Y_values": ys, "hit": hit}
    return row


def _numeric_scan(sol, D, rho, j, k_max, tol):
    """(first k with |Y_k(rho)| < tol |X_k(rho)|, min relative |Y_k|) at embedding j."""
    x1, y1 = sol.X.evaluate_embedded(rho, j), sol.Y.evaluate_embedded(rho, j)
    d = D.evaluate_embedded(rho, j)
    x, y = x1, y1
    hit, best = None, None
    for k in range(1, k_max + 1):
        rel = abs(y) / max(1, abs(x))
        best = rel if best is None else min(best, rel)
        if hit is None and rel < tol:
            hit = k
        x, y = x * x1 + d * y * y1, x * y1 + y * x1
    return hit, best


def case_ii_row(item: dict) -> dict:
    lam, K = lam_parse(item["lam"])
    prec = item["prec"]
    j = item["embedding"]
    row = dict(item)
    with mpmath.workdps(prec + GUARD):
        r = rho_case_ii(lam, item.get("m_choice", 0), None, prec, embedding=j)
        row["rho"] = fmt_complex(r.rho, 30)
        row["q_order"] = r.q_order
        cert = {"kind": "squared_numeric", "lam": item["lam"], "embedding": j, "prec": prec,
                "m_choice": item.get("m_choice", 0), "k_max": item["k_max"], "rho": row["rho"],
                "q_order": r.q_order, "cf_budget": item["cf_budget"], "bit_cap": item["bit_cap"]}
        if item["side"] == "control":
            row["hit"] = None
            row["certificate"] = cert
            return row
        D = quartic_of(lam, K)
        sol = _solution(D, item)
        tol = mpmath.mpf(10) ** (-(prec // 2))
        hit, best = _numeric_scan(sol, D, r.rho, j, item["k_max"], tol)
        row["hit"] = hit
        row["min_relative_Y"] = fmt_real(best, 10)
        cert.update({"hit": hit, "min_relative_Y": row["min_relative_Y"], "tolerance": fmt_real(tol, 5)})
        row["certificate"] = cert
    return row


def theorem4_scan(case_id: str, n_max: int, k_max: int, config: Config | None = None,
                  jobs: int | None = 1) -> ScanReport:
    """Search Y_k(rho(lam)) = 0, k <= k_max, over torsion parameters of order <= n_max."""
    if case_id not in ("i", "ii"):
        raise ValueError("case_id must be 'i' or 'ii'")
    if n_max < 3 or k_max < 1:
        raise ValueError("need n_max >= 3 and k_max >= 1")
    config = config or Config()
    base = {"k_max": k_max, "cf_budget": config.cf_max_steps, "bit_cap": config.coeff_bit_cap, "side": "torsion"}
    items = []
    for n in range(2, n_max + 1):
        for tp in torsion_parameters(n, prec=config.precision_digits):
            desc = {**base, "order": n, "lam": lam_text(tp.lam), "degree": tp.degree}
            if case_id == "i":
                items.append(desc)
            else:
                for j in range(tp.degree):
                    items.append({**desc, "embedding": j, "prec": config.precision_digits})
    if case_id == "ii":
        # non-torsion control: Pell is not solvable there, only q's order is checked
        items.append({**base, "side": "control", "order": None, "lam": lam_text(Fraction(1, 4)), "degree": 1,
                      "embedding": 0, "prec": config.precision_digits})
    rows = run_rows(case_i_row if case_id == "i" else case_ii_row, items, jobs)

    torsion_rows = [r for r in rows if r["side"] == "torsion"]
    hits = sorted({(r["lam"], r.get("embedding")) for r in torsion_rows if r.get("hit") is not None})
    if case_id == "i":
        # each exact hit is a whole Galois orbit of lam
        hit_count = sum(r["degree"] for r in torsion_rows if r.get("hit") is not None)
    else:
        hit_count = len(hits)
    summary = {
        "hits": [h[0] if h[1] is None else f"{h[0]} @ embedding {h[1]}" for h in hits],
        "hit_count": hit_count,
        "rows_tested": len(torsion_rows),
        "errors": {r["lam"]: r["error"]["error"] for r in rows if "error" in r},
        "evidence_not_proof": True,
        "note": NOTE,
    }
    if case_id == "ii":
        orders = [r.get("q_order") for r in rows if "error" not in r]
        summary["q_order_3_all"] = bool(orders) and all(o == 3 for o in orders)
        summary["control_q_order"] = next((r.get("q_order") for r in rows if r["side"] == "control"), None)
    params = {"case": case_id, "n_max": n_max, "k_max": k_max}
    return ScanReport(EXPERIMENT_ID, params, rows, summary, config.provenance())
