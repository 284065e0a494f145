"""Reproducible scans tying the exact and analytic layers together."""

from .pell_scan import control_parameters, pell_torsion_scan
from .replay import replay
from .report import SCHEMA_VERSION, ScanReport, lam_parse, lam_text, run_rows
from .ribet import perturbation, ribet_scan, surface_count
from .squared_factor import theorem4_scan

__all__ = [
    "SCHEMA_VERSION",
    "ScanReport",
    "control_parameters",
    "lam_parse",
    "lam_text",
    "pell_torsion_scan",
    "perturbation",
    "replay",
    "ribet_scan",
    "run_rows",
    "surface_count",
    "theorem4_scan",
]
