"""Command-line contract: exit codes, JSON report schema, CSV trajectory
format, configuration handling."""
import json

import numpy as np
import pytest

from cyclogaudin.cli import main

REPORT_SCHEMA = {
    "type": "object",
    "required": ["suite", "seed", "config_digest", "cases", "pass"],
    "additionalProperties": False,
    "properties": {
        "suite": {"type": "string"},
        "seed": {"type": "integer"},
        "config_digest": {"type": "string", "pattern": "^[0-9a-f]{16}$"},
        "pass": {"type": "boolean"},
        "cases": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "residual", "tol", "pass"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "residual": {"type": "number"},
                    "tol": {"type": "number"},
                    "pass": {"type": "boolean"},
                },
            },
        },
    },
}


def _run(argv, out):
    return main(argv + ["--output", str(out)])


def test_verify_reports_pass_and_validates_schema(tmp_path):
    jsonschema = pytest.importorskip("jsonschema")
    out = tmp_path / "rep.json"
    code = _run(["verify", "--suite", "algebra", "--T", "3", "--seed", "7"],
                out)
    assert code == 0
    rep = json.loads(out.read_text())
    jsonschema.validate(rep, REPORT_SCHEMA)
    assert rep["suite"] == "algebra" and rep["seed"] == 7 and rep["pass"]
    names = [c["name"] for c in rep["cases"]]
    assert names == sorted(names)


def test_verify_failure_exit_code(tmp_path):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({"tol_scale": 1e-30}))
    out = tmp_path / "rep.json"
    code = main(["verify", "--suite", "ratmat", "--T", "2",
                 "--config", str(cfgfile), "--output", str(out)])
    assert code == 1
    assert json.loads(out.read_text())["pass"] is False


@pytest.mark.parametrize("argv", [
    ["verify", "--suite", "models", "--T", "0"],
    ["verify", "--suite", "models", "--T", "1"],
    ["simulate", "--schedule", "1;0;1", "--model", "toda", "--T", "3"],
    ["simulate", "--schedule", "1:0:1", "--model", "toda", "--T", "3",
     "--zeta1", "bogus"],
    ["closure", "--flow-a", "0:0", "--model", "coupled", "--T", "2"],
])
def test_config_errors_exit_2(tmp_path, argv):
    assert main(argv + ["--output", str(tmp_path / "o")]) == 2


def test_unknown_config_key_rejected(tmp_path):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({"modell": "toda"}))
    assert main(["verify", "--suite", "algebra",
                 "--config", str(cfgfile)]) == 2


def test_flags_override_config_file(tmp_path):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({"seed": 5, "T": 2}))
    out = tmp_path / "rep.json"
    code = main(["verify", "--suite", "algebra", "--config", str(cfgfile),
                 "--seed", "9", "--output", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["seed"] == 9


def test_simulate_csv_contract(tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["simulate", "--schedule", "1:0:0.05", "--model", "toda",
            "--T", "3", "--seed", "3", "--h", "1e-3"]
    assert _run(argv, out1) == 0
    assert _run(argv, out2) == 0
    raw = out1.read_bytes()
    # bit-exact reproducibility, LF endings
    assert raw == out2.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    header = lines[0].split(",")
    assert header[:5] == ["sample", "seg", "flow_p", "flow_r", "t_local"]
    assert "q1" in header and "p3" in header and "H_1_0" in header
    assert header[-1] == "drift_max"
    assert len(lines) == 1 + 51          # initial sample + 50 steps
    row = lines[1].split(",")
    assert len(row) == len(header)
    # 17 significant digits on every numeric cell
    assert "e" in row[5] and len(row[5].split("e")[0].lstrip("-").replace(
        ".", "")) == 17
    # the Hamiltonian drift column stays at integrator roundoff
    drift = max(float(l.split(",")[-1]) for l in lines[1:])
    assert drift <= 1e-12


def test_simulate_complex_model_headers(tmp_path):
    out = tmp_path / "c.csv"
    code = _run(["simulate", "--schedule", "1:1:0.01", "--model", "dst",
                 "--T", "2", "--seed", "4"], out)
    assert code == 0
    header = out.read_text().splitlines()[0].split(",")
    assert "x_re1" in header and "X_im2" in header
    assert "H_1_1_re" in header and "H_1_1_im" in header
    assert not any(h.startswith("q") for h in header)


def test_simulate_divergence_exit_3(tmp_path):
    cfgfile = tmp_path / "cfg.json"
    out = tmp_path / "d.csv"
    # a deliberately explosive coupled run: huge step, strong coupling
    with np.errstate(over="ignore", invalid="ignore"):
        code = main(["simulate", "--schedule", "3:1:200", "--model",
                     "coupled", "--T", "2", "--seed", "1", "--beta", "1.0",
                     "--h", "1.0", "--output", str(out)])
    assert code == 3
    assert out.read_text().rstrip().endswith("# diverged")


def test_run_suite_rejects_unknown_name():
    from cyclogaudin.errors import ConfigError
    from cyclogaudin.suites import RunConfig, run_suite
    with pytest.raises(ConfigError):
        run_suite("bogus", RunConfig())


def test_closure_command_json(tmp_path):
    out = tmp_path / "cl.json"
    code = _run(["closure", "--flow-a", "1:0", "--flow-b", "1:1",
                 "--model", "coupled", "--T", "2", "--seed", "6",
                 "--beta", "0.5", "--zeta1", "0.9"], out)
    assert code == 0
    rep = json.loads(out.read_text())
    assert {"model", "seed", "config_digest", "flow_a", "flow_b", "residual",
            "residual_refined", "ratio", "h", "delta"} <= set(rep)
    assert rep["residual"] <= 1e-6
    assert rep["ratio"] >= 3.0 or rep["residual_refined"] < 1e-12
