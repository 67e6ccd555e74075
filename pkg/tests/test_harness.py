import json

import pytest

from ssdenlarge.errors import ConfigError
from ssdenlarge.harness import CHECKS, parse_config, run_suite
from ssdenlarge.harness.cli import main

IDG = {"id": "idg", "space": "p1", "affine": {"M": [[1.0]], "p": [0.0]}, "with": ["ea", "ebar"]}


def small_config(checks, **extra):
    cfg = {"schema": 1, "seed": 7, "spaces": [{"id": "p1", "preset": "product:1"}],
           "sets": [IDG], "checks": checks}
    cfg.update(extra)
    return cfg


def write(tmp_path, cfg):
    p = tmp_path / "suite.json"
    p.write_text(json.dumps(cfg))
    return str(p)


def test_empty_check_list(tmp_path, capsys):
    assert main(["verify", "--config", write(tmp_path, small_config([]))]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["reports"] == [] and out["summary"]["total"] == 0


def test_negative_control_expected_fail(tmp_path, capsys):
    cfg = small_config([{"check": "additivity_equivalence", "on": "idg.ea", "expect": "fail",
                         "trials": 300, "samples": 150}])
    assert main(["verify", "--config", write(tmp_path, cfg)]) == 0
    (rep,) = json.loads(capsys.readouterr().out)["reports"]
    assert rep["status"] == "expected-fail-confirmed"


def test_mismatch_exit_code(tmp_path, capsys):
    # E^A of the identity graph is not additive, so expecting a pass is a mismatch
    cfg = small_config([{"check": "additivity_pair", "on": "idg.ea", "trials": 300}])
    assert main(["verify", "--config", write(tmp_path, cfg)]) == 1


@pytest.mark.parametrize("bad", [
    {"schema": 2, "seed": 1, "checks": []},
    {"schema": 1, "checks": []},
    {"schema": 1, "seed": 1, "checks": [{"check": "no_such_check", "on": "*"}]},
    {"schema": 1, "seed": 1, "checks": [{"check": "q_positivity", "on": "*", "expect": "maybe"}]},
])
def test_config_errors(tmp_path, bad, capsys):
    assert main(["verify", "--config", write(tmp_path, bad)]) == 2
    assert "config error" in capsys.readouterr().err


def test_unresolved_reference():
    with pytest.raises(ConfigError):
        parse_config(small_config([{"check": "lambda_axioms", "on": "missing.ea"}]))


def test_missing_file(capsys):
    assert main(["verify", "--config", "/nonexistent/suite.json"]) == 2


def test_only_and_text_output(tmp_path, capsys):
    cfg = small_config([{"check": "q_positivity", "on": "idg", "trials": 50},
                        {"check": "lambda_axioms", "on": "idg.*", "samples": 50}])
    out = tmp_path / "r.txt"
    assert main(["verify", "--config", write(tmp_path, cfg), "--only", "q_positivity",
                 "--format", "text", "--out", str(out)]) == 0
    text = out.read_text()
    assert "q_positivity" in text and "lambda_axioms" not in text
    assert (tmp_path / "r.txt.timing.json").exists()


def test_seed_override(tmp_path):
    cfg = parse_config(small_config([{"check": "q_positivity", "on": "idg", "trials": 20},
                                     {"check": "lambda_axioms", "on": "idg.ea", "samples": 20}]))
    res = run_suite(cfg, seed_override=100)
    assert res.header["seed"] == 100
    assert [r.seed for r in res.reports] == [100, 101]
    assert run_suite(cfg, seed_override=100).to_json() == res.to_json()


def test_check_errors_become_reports():
    cfg = parse_config(small_config([{"check": "grid_oracle", "on": "idg.phi"}]))
    # the identity-graph Phi is a quadratic; the oracle runs on it
    assert run_suite(cfg).reports[0].status in ("pass", "error", "fail")


def test_calibration_in_header():
    cfg = parse_config(small_config([], calibration=True))
    res = run_suite(cfg)
    assert res.header["calibration"]["agree"] is True


def test_registry_covers_all_targets():
    assert {spec.target for spec in CHECKS.values()} == {"space", "set", "set_fn", "fn", "enlargement", "none"}


def test_gen_command(capsys):
    assert main(["gen", "--kind", "finite", "--count", "2", "--dim", "1", "--seed", "3", "--points", "3"]) == 0
    specs = json.loads(capsys.readouterr().out)
    assert len(specs) == 2 and all(len(sp["finite"]) == 3 for sp in specs)


def test_eval_command(capsys):
    fn = json.dumps({"max_affine": {"pieces": [{"g": [1], "c": 0}, {"g": [-1], "c": 0}]}})
    assert main(["eval", "--fn", fn, "--at", "-2", "--at", "0.5", "--csv"]) == 0
    rows = capsys.readouterr().out.split()
    assert rows == ["b0,value", "-2.0,2.0", "0.5,0.5"]
    assert main(["eval", "--fn", fn, "--at", "2", "--conjugate"]) == 0
    assert json.loads(capsys.readouterr().out)["value"] == "inf"


def test_eval_bad_json(capsys):
    assert main(["eval", "--fn", "{not json", "--at", "1"]) == 2
