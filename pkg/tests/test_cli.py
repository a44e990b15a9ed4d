import json

import pytest
from click.testing import CliRunner

from bandforge.cli import main

BAND = {
    "construction": "band",
    "operator": {"kind": "shift"},
    "steps": 6,
    "lambda_spec": {"kind": "constant", "value": 0.1},
    "K": 1,
}


def invoke(*args):
    res = CliRunner().invoke(main, list(map(str, args)))
    lines = [line for line in res.stdout.splitlines() if line.strip()]
    assert len(lines) == 1, res.output
    return res.exit_code, json.loads(lines[0])


@pytest.fixture
def run_dir(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(BAND))
    out = tmp_path / "run"
    code, doc = invoke("build", "--config", cfg, "--out", out)
    assert code == 0 and doc["pass"], doc
    return out


def test_build_writes_run(run_dir):
    # [TRIVIAL]
    for f in ("config.json", "state.json", "steps.jsonl", "report.json"):
        assert (run_dir / f).is_file()
    assert len((run_dir / "steps.jsonl").read_text().splitlines()) == 6


def test_verify_ok(run_dir):
    # [TRIVIAL]
    assert invoke("verify", "--run", run_dir) == (0, {"status": "ok", "pass": True, "failed": []})


def test_tampered_run_fails_audit(run_dir):
    # [TRIVIAL]
    p = run_dir / "state.json"
    doc = json.loads(p.read_text())
    doc["basis"][2]["re"][0] += 1e-3
    p.write_text(json.dumps(doc))
    code, out = invoke("verify", "--run", run_dir)
    assert code == 4 and "basis_digest" in out["failed"]
    assert "orthonormality" in out["failed"]


def test_export(run_dir):
    # [TRIVIAL]
    code, doc = invoke("export", "--run", run_dir, "--format", "json", "--size", 3)
    assert code == 0
    assert (run_dir / "matrix_3.json").is_file() and (run_dir / "decay.csv").is_file()
    assert invoke("export", "--run", run_dir, "--size", 99)[0] == 2


def test_config_errors(tmp_path):
    # [TRIVIAL]
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert invoke("build", "--config", bad, "--out", tmp_path / "r")[0] == 2
    assert invoke("verify", "--run", tmp_path / "missing")[0] == 2
    assert invoke("export", "--run", tmp_path / "missing", "--size", 1)[0] == 2


def test_construction_failure(tmp_path):
    # [TRIVIAL]
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({**BAND, "lambda_spec": {"kind": "constant", "value": 2.0}}))
    code, doc = invoke("build", "--config", cfg, "--out", tmp_path / "r")
    assert code == 3 and doc["step"] == 1 and doc["status"] == "construction_failed"
