import json
from fractions import Fraction

import pytest

from torsionlab.config import Config
from torsionlab.elliptic import family_curve, family_point, torsion_count, torsion_order
from torsionlab.experiments import (
    ScanReport,
    control_parameters,
    pell_torsion_scan,
    replay,
    ribet_scan,
    surface_count,
    theorem4_scan,
)


def test_controls_are_seeded_and_nontorsion():
    a = control_parameters(6, 0x5EED)
    assert a == control_parameters(6, 0x5EED)
    assert a[0] == Fraction(1, 4) and len(a) == 4
    for lam in a:
        assert torsion_order(family_curve(lam), family_point(lam), 12) is None
    assert control_parameters(6, 1) != a


def test_pell_torsion_scan_small():
    rep = pell_torsion_scan(4, 64)
    assert rep.summary["violations"] == 0
    rows = {r["lam"]: r for r in rep.rows}
    assert rows["0"]["verdict"] == "solvable"  # order 3
    assert rows["1/4"]["verdict"] == "inconclusive (budget 64)"
    assert rep.summary["torsion_parameters"] == torsion_count(3) + torsion_count(4)
    assert rep.provenance["seed"] == 0x5EED


def test_squared_factor_case_i_rows():
    rep = theorem4_scan("i", 4, 10)
    errors = [r for r in rep.rows if "error" in r]
    assert [r["lam"] for r in errors] == ["0"]
    assert errors[0]["error"]["error"] == "RhoOnCurveBranch"
    for r in rep.rows:
        if "error" not in r:
            assert len(r["certificate"]["Y_values"]) == 10
    assert rep.summary["evidence_not_proof"] is True


def test_squared_factor_monotone_in_k():
    small, big = theorem4_scan("i", 5, 5), theorem4_scan("i", 5, 10)
    assert set(small.summary["hits"]) <= set(big.summary["hits"])


def test_squared_factor_case_ii_control():
    rep = theorem4_scan("ii", 3, 5)
    assert rep.summary["control_q_order"] == 3


def test_ribet_scan_small():
    rep = ribet_scan(3)
    assert rep.summary["points"] == 3 + 8
    assert rep.summary["orders_by_n"]["3"] == {"9": 8}
    assert rep.summary["fraction_divides_n2"] == 1.0
    assert rep.summary["perturbation_breaks_torsion"]


def test_surface_counts():
    rep = surface_count("quartic", 5)
    assert rep.summary["counts_agree"]
    assert rep.summary["S_m_E"] == {"2": 0, "3": 1, "4": 3, "5": 6}
    lem = surface_count("lemniscatic", 3)
    assert lem.summary["ribet_fraction"] == 1.0 and lem.summary["generic_fraction"] == 0.0
    with pytest.raises(ValueError):
        surface_count("nope", 3)


def test_report_roundtrip_and_csv():
    rep = pell_torsion_scan(3, 16)
    back = ScanReport.from_dict(json.loads(rep.to_json()))
    assert back.to_dict() == rep.to_dict()
    lines = rep.to_csv().strip().splitlines()
    assert len(lines) == len(rep.rows) + 1
    assert "verdict" in lines[0]


def test_rows_replay():
    reports = [pell_torsion_scan(4, 32), theorem4_scan("i", 4, 5), theorem4_scan("ii", 3, 5), ribet_scan(3)]
    for rep in reports:
        for row in rep.rows:
            if "certificate" in row:
                assert replay(json.loads(json.dumps(row)))["ok"], row


def test_replay_detects_tampering():
    rep = pell_torsion_scan(3, 16)
    row = next(r for r in rep.rows if r.get("verdict") == "solvable")
    cert = dict(row["certificate"], Y="x")
    assert not replay(cert)["ok"]


def test_deterministic_given_config():
    cfg = Config(seed=11)
    a, b = pell_torsion_scan(3, 16, cfg), pell_torsion_scan(3, 16, cfg)
    strip = lambda rep: [{k: v for k, v in r.items() if k != "seconds"} for r in rep.rows]  # noqa: E731
    assert strip(a) == strip(b)


def test_parallel_rows_match_serial():
    a = ribet_scan(3, jobs=1)
    b = ribet_scan(3, jobs=2)
    strip = lambda rep: [{k: v for k, v in r.items() if k != "seconds"} for r in rep.rows]  # noqa: E731
    assert strip(a) == strip(b)
