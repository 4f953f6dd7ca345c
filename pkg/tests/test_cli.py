import csv
import io
import json
import math
import subprocess
import sys

import pytest

from separable_metrology.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), stdout=out)
    return code, out.getvalue()


def parse_csv(text):
    lines = text.splitlines()
    assert lines[0].startswith("# manifest: ")
    manifest = json.loads(lines[0][len("# manifest: "):])
    return manifest, list(csv.DictReader(lines[1:]))


def test_fringe_rows_and_amplitude():
    code, text = run("fringe", "--n", "5", "--points", "101")
    assert code == 0
    manifest, rows = parse_csv(text)
    assert len(rows) == 101
    assert manifest["command"] == "fringe" and manifest["deterministic"] is True
    assert "timestamp" not in manifest
    code, text = run("fringe", "--n", "2", "--t", "0.9,0.8", "--gamma", str(math.pi / 2))
    pd = [float(r["P_D"]) for r in parse_csv(text)[1]]
    assert max(pd) - min(pd) == pytest.approx(0.72, abs=1e-3)


@pytest.mark.parametrize(
    "argv",
    [
        ("fringe", "--n", "3", "--points", "7", "--xi", "0.3"),
        ("sensitivity", "--n-max", "3", "--t", "0.9"),
        ("loss", "--n", "2", "--points", "4"),
        ("state", "--n", "2", "--t", "0.7", "--phi", "0.4"),
    ],
)
def test_outputs_are_byte_identical_and_checks_pass(argv):
    a = run(*argv, "--check")
    b = run(*argv, "--check")
    assert a == b
    assert a[0] == 0


def test_corrupted_tolerance_fails_check(capsys):
    code, _ = run("fringe", "--n", "2", "--points", "5", "--check", "--oracle-tolerance", "-1")
    assert code == 3
    assert capsys.readouterr().err.startswith("error[check]:")


@pytest.mark.parametrize(
    "argv",
    [("fringe", "--n", "0"), ("fringe", "--points", "1"), ("bogus",), ("state", "--stats", "anyon"),
     ("fringe", "--n", "3", "--t", "0.5,0.5")],
)
def test_usage_errors(argv, capsys):
    assert run(*argv)[0] == 1
    err = capsys.readouterr().err
    assert err.startswith("error[usage]:") and err.count("\n") == 1


def test_domain_error(capsys):
    assert run("state", "--n", "1", "--t", "1.5")[0] == 2
    assert capsys.readouterr().err.startswith("error[domain]:")


def test_json_format_uses_null_for_non_finite():
    code, text = run("loss", "--n", "2", "--points", "3", "--format", "json")
    assert code == 0
    payload = json.loads(text)
    assert set(payload) == {"manifest", "rows"}
    first = payload["rows"][0]  # transmission 0: no phase information
    assert first["transmission"] == 0.0
    assert first["delta_phi_min"] is None
    assert payload["rows"][-1]["visibility"] == pytest.approx(1.0, abs=1e-10)


def test_config_file_and_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n = 4\npoints = 9\nxi = 0.25\n")
    _, text = run("fringe", "--config", str(cfg))
    manifest, rows = parse_csv(text)
    assert manifest["config"]["n"] == 4 and len(rows) == 9
    assert manifest["config"]["xi"] == 0.25
    _, text = run("fringe", "--config", str(cfg), "--n", "2")
    manifest, rows = parse_csv(text)
    assert manifest["config"]["n"] == 2 and len(rows) == 9
    bad = tmp_path / "bad.cfg"
    bad.write_text("n_max = 3\n")
    assert run("fringe", "--config", str(bad))[0] == 1
    assert run("fringe", "--config", str(tmp_path / "missing.cfg"))[0] == 1


def test_degrees_flag_matches_radians():
    _, deg = run("fringe", "--n", "2", "--points", "5", "--deg", "--phi-max", "90", "--xi", "30")
    _, rad = run("fringe", "--n", "2", "--points", "5", "--phi-max", repr(math.pi / 2), "--xi", repr(math.pi / 6))
    pd_deg = [float(r["P_D"]) for r in parse_csv(deg)[1]]
    pd_rad = [float(r["P_D"]) for r in parse_csv(rad)[1]]
    assert pd_deg == pytest.approx(pd_rad, abs=1e-15)


def test_stamp_adds_timestamp():
    _, text = run("state", "--n", "1", "--stamp")
    manifest, _ = parse_csv(text)
    assert manifest["deterministic"] is False and "timestamp" in manifest


def test_state_rows_are_normalized():
    _, text = run("state", "--n", "2", "--t", "0.6,0.8", "--format", "json")
    rows = json.loads(text)["rows"]
    assert sum(r["re"] ** 2 + r["im"] ** 2 for r in rows) == pytest.approx(1.0, abs=1e-12)
    assert len(rows) == 5


def test_sensitivity_columns():
    _, text = run("sensitivity", "--n-max", "4", "--xi", "0.37")
    _, rows = parse_csv(text)
    assert [int(r["n"]) for r in rows] == [1, 2, 3, 4]
    for r in rows:
        assert float(r["delta_phi_min"]) == pytest.approx(1 / int(r["n"]), abs=1e-6)
        assert r["regime"] == "heisenberg"


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "separable_metrology", "state", "--n", "1"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("# manifest: ")
