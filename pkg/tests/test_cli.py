import io
import json
import os

import pytest

from torsionlab.cli import run
from torsionlab.config import Config, load_config, parse_config_text

SCHEMA = os.path.join(os.path.dirname(__file__), "..", "docs", "output.schema.json")


def _run(argv, tmp_path=None):
    out, err = io.StringIO(), io.StringIO()
    if tmp_path is not None:
        argv = ["--cache-dir", str(tmp_path / "cache")] + argv
    code = run(argv, out, err)
    body = json.loads(out.getvalue()) if out.getvalue() else None
    return code, body, err.getvalue()


def _validate(body):
    jsonschema = pytest.importorskip("jsonschema")
    with open(SCHEMA, encoding="utf-8") as fh:
        jsonschema.validate(body, json.load(fh))


def test_pell_solve():
    code, body, _ = _run(["pell", "solve", "--D", "x^2+1"])
    assert code == 0
    assert body["X"] == "2*x^2+1" and body["Y"] == "2*x"
    assert body["provenance"]["precision_digits"] == 50
    _validate(body)


def test_domain_error_exit_1():
    code, body, _ = _run(["pell", "solve", "--D", "x^3+1"])
    assert code == 1
    assert body["error"] == "OddDegree"
    assert set(body) >= {"error", "message", "context", "provenance"}
    _validate(body)


def test_usage_errors_exit_2():
    assert _run(["pell", "frobnicate"])[0] == 2
    assert _run(["pell", "solve"])[0] == 2
    assert _run(["--precision", "5", "pell", "solve", "--D", "x^2+1"])[0] == 2
    assert _run([])[0] == 2


def test_torsion_params_order_3():
    code, body, _ = _run(["torsion", "params", "--order", "3"])
    assert code == 0
    assert [p["rational"] for p in body["parameters"]] == ["0"]


def test_torsion_order_control():
    code, body, _ = _run(["torsion", "order", "--lam", "1/4", "--n-max", "30"])
    assert code == 0 and body["order"] is None
    code, body, _ = _run(["torsion", "order", "--curve", "a=0,b=1; P=(0,-1)"])
    assert body["order"] == 3


def test_pell_power_and_squared():
    code, body, _ = _run(["pell", "power", "--D", "x^2+1", "--n", "2"])
    assert body["X"] == "8*x^4+8*x^2+1"
    code, body, _ = _run(["pell", "squared", "--Q", "x^2+1", "--rho", "0"])
    assert body["n"] == 1
    code, body, _ = _run(["pell", "squared", "--Q", "x^4+x+1/4", "--rho", "0", "--n-max", "3"])
    assert code == 1 and body["error"] == "PellUnsolvable"


def test_lattice_commands():
    code, body, _ = _run(["lattice", "periods", "--g2", "4", "--g3", "0"])
    assert body["lattice"]["omega1"].startswith("2.6220575542921198104648395898911")
    code, body, _ = _run(["lattice", "eval", "--g2", "4", "--g3", "0", "--fn", "elog", "--point", "1,0"])
    assert body["z"].startswith("1.3110287771460599052324197949")
    code, body, _ = _run(["lattice", "eval", "--g2", "4", "--g3", "0", "--fn", "wp", "--z", "0"])
    assert code == 1 and body["error"] == "PoleProximity"


def test_gext_and_ribet_commands():
    code, body, _ = _run(["gext", "make", "--g2", "4", "--g3", "0", "--v", "0"])
    assert code == 1 and body["error"] == "TorsionZeroQ"
    code, body, _ = _run(["gext", "betti", "--g2", "4", "--g3", "0", "--v", "0.3+0.1i", "--t", "0", "--z", "0"])
    assert code == 0 and body["betti"]["b1"] == "0.0"
    code, body, _ = _run(["ribet", "check", "--n", "3"])
    assert body["m"] == 9 and body["divides_n2"]
    code, body, _ = _run(["ribet", "delta", "--alpha", "i", "--u", "0.3+0.1i"])
    assert code == 1 and body["error"] == "AlphaParity"


def test_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nprecision_digits = 30\nseed = 0x10\n")
    assert load_config(cfg) == Config(precision_digits=30, seed=16)
    code, body, _ = _run(["--config", str(cfg), "--seed", "5", "torsion", "params", "--order", "3"])
    assert body["provenance"]["precision_digits"] == 30 and body["provenance"]["seed"] == 5
    with pytest.raises(ValueError):
        parse_config_text("unknown = 1")
    bad = tmp_path / "bad.cfg"
    bad.write_text("cf_max_steps = 0\n")
    assert _run(["--config", str(bad), "torsion", "params", "--order", "3"])[0] == 2


def test_scan_cache_and_replay(tmp_path):
    argv = ["scan", "pell-torsion", "--n-max", "3", "--cf-budget", "16", "--jobs", "1", "--csv", str(tmp_path / "r.csv")]
    code, body, _ = _run(argv, tmp_path)
    assert code == 0 and body["cached"] is False
    _validate(body)
    files = list((tmp_path / "cache" / "pell-torsion").glob("*.json"))
    assert len(files) == 1
    code, again, _ = _run(argv, tmp_path)
    assert again["cached"] is True and again["rows"] == body["rows"]
    # a changed parameter is a different cache entry
    _run(["scan", "pell-torsion", "--n-max", "3", "--cf-budget", "17", "--jobs", "1"], tmp_path)
    assert len(list((tmp_path / "cache" / "pell-torsion").glob("*.json"))) == 2
    assert (tmp_path / "r.csv").read_text().count("\n") == len(body["rows"]) + 1

    report = tmp_path / "report.json"
    report.write_text(json.dumps(body))
    code, res, _ = _run(["replay", str(report)])
    assert code == 0 and res["ok"] and res["replayed"] == len(body["rows"])
    one = tmp_path / "one.json"
    one.write_text(json.dumps(body["rows"][0]["certificate"]))
    assert _run(["replay", str(one)])[1]["ok"]
    assert _run(["replay", str(tmp_path / "missing.json")])[0] == 2


def test_other_scans(tmp_path):
    code, body, _ = _run(["scan", "theorem4", "--case", "i", "--n-max", "3", "--k-max", "4", "--jobs", "1"], tmp_path)
    assert code == 0 and body["experiment_id"] == "theorem4"
    code, body, _ = _run(["scan", "surface", "--family", "quartic", "--m-max", "4", "--jobs", "1"], tmp_path)
    assert body["summary"]["counts_agree"]
    code, body, _ = _run(["scan", "ribet", "--n-max", "3", "--jobs", "1", "--no-cache"], tmp_path)
    assert body["summary"]["fraction_divides_n2"] == 1.0
    assert not (tmp_path / "cache" / "ribet").exists()


def test_output_keys_sorted():
    out = io.StringIO()
    run(["torsion", "params", "--order", "4"], out, io.StringIO())
    text = out.getvalue()
    assert text == json.dumps(json.loads(text), sort_keys=True, indent=2) + "\n"
