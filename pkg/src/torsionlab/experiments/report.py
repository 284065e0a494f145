"""Scan reports, row execution, and descriptors for family parameters."""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

from ..errors import TorsionLabError
from ..exactalg import QQ, FieldPoly, NFElem, format_field_elem, parse_nf_elem

SCHEMA_VERSION = "1.0"


@dataclass
class ScanReport:
    experiment_id: str
    parameters: dict
    rows: list
    summary: dict
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "experiment_id": self.experiment_id,
            "parameters": self.parameters,
            "rows": self.rows,
            "summary": self.summary,
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScanReport":
        return cls(d["experiment_id"], d["parameters"], d["rows"], d["summary"], d.get("provenance", {}))

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=indent)

    def to_csv(self) -> str:
        """One line per row; nested values are JSON-encoded into their cell."""
        cols = sorted({k for row in self.rows for k in row})
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for row in self.rows:
            cells = []
            for c in cols:
                v = row.get(c)
                cells.append(json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else ("" if v is None else v))
            w.writerow(cells)
        return buf.getvalue()


def _guarded(fn, item: dict) -> dict:
    t0 = time.perf_counter()
    try:
        row = fn(item)
    except TorsionLabError as exc:
        row = dict(item)
        row["error"] = exc.to_dict()
    row["seconds"] = round(time.perf_counter() - t0, 4)
    return row


def run_rows(fn, items: list, jobs: int | None = 1) -> list:
    """Apply ``fn`` to every item; domain errors become error rows, order is kept.

    ``fn`` must be a module-level function when ``jobs > 1`` (it is pickled
    into worker processes).
    """
    work = partial(_guarded, fn)
    if not jobs or jobs <= 1 or len(items) < 2:
        return [work(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(work, items, chunksize=max(1, len(items) // (4 * jobs))))


# -- parameter descriptors ----------------------------------------------------


def lam_text(lam) -> str:
    """Text form of a family parameter: ``"1/4"`` or ``"m(t) : t"``."""
    return format_field_elem(lam)


def lam_parse(text: str):
    """Inverse of :func:`lam_text`; returns (lam, field)."""
    lam = parse_nf_elem(text)
    return lam, (lam.parent if isinstance(lam, NFElem) else QQ)


def quartic_of(lam, K) -> FieldPoly:
    """Q_lam(x) = x^4 + x + lam over the field of lam."""
    return FieldPoly([K(lam), 1, 0, 0, 1], K, "x")
