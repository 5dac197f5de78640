import json

import pytest

from schwarzlab.cli import EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_INPUT, EXIT_PASS, run


def report(out, command):
    return json.loads((out / f"{command}_report.json").read_text())


@pytest.mark.parametrize("argv,code", [
    (["verify", "--fixture", "circle"], EXIT_PASS),
    (["verify", "--fixture", "identity-on-circle"], EXIT_FAIL),
    (["classify", "--fixture", "circle"], EXIT_PASS),
    (["classify", "--fixture", "slit"], EXIT_PASS),
    (["wprep", "--fixture", "w2-z"], EXIT_PASS),
    (["trace", "--fixture", "w3-z"], EXIT_PASS),
    (["inner"], EXIT_PASS),
    (["ktheta"], EXIT_PASS),
])
def test_exit_codes(tmp_path, argv, code):
    assert run(argv + ["--out", str(tmp_path)]) == code
    rep = report(tmp_path, argv[0])
    assert rep["exit_code"] == code and rep["command"] == argv[0]


def test_classify_labels(tmp_path):
    for fx, label in [("circle", "1"), ("slit", "2a"), ("tangent-circles", "2b"), ("cusp", "2c")]:
        assert run(["classify", "--fixture", fx, "--out", str(tmp_path)]) == EXIT_PASS
        assert report(tmp_path, "classify")["result"]["label"] == label


def test_trace_report(tmp_path):
    run(["trace", "--fixture", "w2-z", "--out", str(tmp_path)])
    assert report(tmp_path, "trace")["result"]["cycles"] == "(1 2)"
    assert (tmp_path / "trace.csv").read_text().startswith("root,re,im")


def test_ktheta_rejects_z(tmp_path):
    cfg = tmp_path / "job.json"
    cfg.write_text(json.dumps({"command": "ktheta", "model": {"expr": "z"}}))
    assert run(["ktheta", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_FAIL


def test_fixture_files_drive_commands(tmp_path):
    assert run(["fixtures", "--out", str(tmp_path)]) == EXIT_PASS
    assert run(["verify", "--config", str(tmp_path / "verify_circle.json"), "--out", str(tmp_path)]) == EXIT_PASS
    assert run(["ktheta", "--config", str(tmp_path / "ktheta_kernel.json"), "--out", str(tmp_path)]) == EXIT_PASS


def test_svg_side_file(tmp_path):
    run(["verify", "--fixture", "circle", "--svg", "on", "--out", str(tmp_path)])
    assert (tmp_path / "verify.svg").read_text().startswith("<svg")


def test_wprep_writes_pencil_that_trace_reads(tmp_path):
    assert run(["wprep", "--fixture", "w2-z", "--out", str(tmp_path)]) == EXIT_PASS
    cfg = tmp_path / "trace.json"
    cfg.write_text(json.dumps({"inputs": {"pencil": "pencil.json"}, "params": {"radius": 0.02}}))
    assert run(["trace", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_PASS
    assert report(tmp_path, "trace")["result"]["cycles"] == "(1 2)"


@pytest.mark.parametrize("payload", [
    {"bogus": 1},
    {"inputs": {"arc": "missing.json"}},
    {"tolerances": {"leak": -1}},
    {"tolerances": {"nonexistent": 1}},
    {"params": {"zzz": 1}},
    {"command": "trace"},
    {"format_version": 7},
    {"model": {"expr": "__import__('os')"}, "inputs": {}},
])
def test_config_errors(tmp_path, payload):
    cfg = tmp_path / "job.json"
    cfg.write_text(json.dumps(payload))
    assert run(["verify", "--fixture", "circle", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_INPUT


def test_input_errors_without_config(tmp_path):
    assert run(["classify", "--fixture", "nope", "--out", str(tmp_path)]) == EXIT_INPUT
    assert run(["verify", "--config", str(tmp_path / "absent.json"), "--out", str(tmp_path)]) == EXIT_INPUT
    assert run(["inner", "--samples", "1000", "--out", str(tmp_path)]) == EXIT_INPUT
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["verify", "--config", str(bad), "--out", str(tmp_path)]) == EXIT_INPUT


def test_report_embeds_run_settings(tmp_path):
    run(["inner", "--seed", "7", "--out", str(tmp_path)])
    rep = report(tmp_path, "inner")
    assert rep["seed"] == 7 and "leak" in rep["tolerances"] and rep["status"] == "pass"
