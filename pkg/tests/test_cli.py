"""CLI: config parsing, report formats, round trips and exit codes."""

import csv
import json
import math

import pytest

from nanospec.cli import (
    EXIT_COMPUTE,
    EXIT_CONFIG,
    EXIT_OK,
    ConfigError,
    main,
    parse_config,
)


def run_cli(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_states_json(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main(["states", "--v", "1", "--a", "1", "--q", "1", "--out", str(out)])
    assert code == EXIT_OK
    data = json.loads(out.read_text())
    assert data["config"]["mode"] == "states"
    states = data["channels"][0]["states"]
    assert len(states) == 2
    res = sorted(s["re"] for s in states)
    assert abs(res[0] - (1 - math.sqrt(2))) < 1e-12
    assert abs(res[1] - (1 + math.sqrt(2))) < 1e-12
    assert {"re", "im", "sheet", "kind", "multiplicity"} <= set(states[0])


def test_json_round_trip_17_digits(tmp_path):
    out = tmp_path / "report.json"
    main(["states", "--v", "0.1", "--a", "0.7", "--q", "0.3,-1.1", "--out", str(out)])
    data = json.loads(out.read_text())
    # re-serialize every numeric field and confirm bit-exact recovery
    for st in data["channels"][0]["states"]:
        for key in ("re", "im"):
            assert float(format(st[key], ".17g")) == st[key]


def test_csv_output(tmp_path):
    out = tmp_path / "report.csv"
    code = main(
        ["states", "--v", "1", "--a", "1", "--q", "1", "--out", str(out), "--format", "csv"]
    )
    assert code == EXIT_OK
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["b", "channel", "a", "re", "im", "sheet", "kind", "multiplicity"]
    assert len(rows) == 3
    assert float(rows[1][3]) == pytest.approx(1 - math.sqrt(2))


def test_tube_mode(tmp_path):
    out = tmp_path / "tube.json"
    code = main(["tube", "--N", "3", "--b", "0", "--v", "1", "--out", str(out)])
    assert code == EXIT_OK
    data = json.loads(out.read_text())
    a_vals = sorted(ch["a"] for ch in data["channels"])
    assert a_vals == pytest.approx([1.0, 1.0, 2.0])
    assert any(abs(x - 1.0) < 1e-9 for x in data["validation"]["pp_spectrum"])


def test_verify_mode(tmp_path):
    out = tmp_path / "verify.json"
    code = main(
        ["verify", "--v", "1", "--a", "1", "--q", "1", "--oracle-size", "2000",
         "--out", str(out)]
    )
    assert code == EXIT_OK
    data = json.loads(out.read_text())
    assert data["validation"]["ok"] is True
    assert data["validation"]["max_deviation"] < 1e-6


def test_sweep_mode(tmp_path):
    out = tmp_path / "sweep.json"
    code = main(
        ["sweep", "--N", "3", "--v", "1", "--q", "1", "--grid", "0:0.3:3",
         "--out", str(out)]
    )
    assert code == EXIT_OK
    data = json.loads(out.read_text())
    assert len(data["sweep"]) == 3
    first = data["sweep"][0]["channels"][0]["states"][0]
    assert "trajectory" in first


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('mode = "states"\nv = 1.0\na = 1.0\nq = [2.0]\n')
    parsed = parse_config(["--config", str(cfg)])
    assert parsed["q"] == [2.0]
    parsed = parse_config(["--config", str(cfg), "--q", "1"])
    assert parsed["q"] == [1.0]  # flags win


def test_config_errors_exit_1(capsys):
    assert main(["states", "--a", "-1", "--q", "1"]) == EXIT_CONFIG
    assert main(["states", "--a", "1", "--q", "1,0"]) == EXIT_CONFIG
    assert main([]) == EXIT_CONFIG
    assert main(["sweep", "--N", "3"]) == EXIT_CONFIG
    assert main(["states", "--a", "1", "--q", "x"]) == EXIT_CONFIG
    capsys.readouterr()


def test_bad_toml_rejected(tmp_path):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("mode = [unclosed")
    with pytest.raises(ConfigError):
        parse_config(["states", "--config", str(cfg)])


def test_tolerance_unknown_key_rejected(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('mode = "states"\na = 1.0\nq = [1.0]\n[tolerances]\nbogus = 1\n')
    with pytest.raises(ConfigError):
        parse_config(["--config", str(cfg)])


def test_stdout_default(capsys):
    code, out, _ = run_cli(["states", "--v", "1", "--a", "1", "--q", "1"], capsys)
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["validation"]["total_multiplicity"] == 2
