"""End-to-end CLI checks: golden files, determinism, exit codes, config."""

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from walklab.cli import main

from helpers import json_numbers_close

GOLDEN = Path(__file__).parent / "golden"


def run_cli(args: list[str]) -> int:
    return main(args)


def _read_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _csv_rows(path) -> list[list[float]]:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().strip().splitlines()
    assert lines[0] == "t,p_marked,p_nbhd,norm"
    return [[float(x) for x in line.split(",")] for line in lines[1:]]


def _csv_close(a, b, atol=1e-9):
    assert len(a) == len(b)
    for ra, rb in zip(a, b):
        assert len(ra) == len(rb)
        for x, y in zip(ra, rb):
            assert abs(x - y) <= atol * max(1.0, abs(x), abs(y))


GOLDEN_JSON_CASES = [
    ("spectrum_torus4.json",
     ["spectrum", "--family", "torus", "--side", "4", "--dims", "2",
      "--shift", "flip-flop"]),
    ("predict_torus16.json",
     ["predict", "--family", "torus", "--side", "16", "--dims", "2"]),
    ("predict_complete64.json",
     ["predict", "--family", "complete", "--n", "64"]),
    ("sweep_2d.json",
     ["sweep", "--family", "torus", "--dims", "2", "--sides", "8,16,32"]),
    ("two_marked8.json",
     ["two-marked", "--side", "8", "--v1", "0,0", "--v2", "3,5",
      "--t-max", "50"]),
    ("amplify8.json",
     ["amplify", "--family", "torus", "--side", "8", "--dims", "2",
      "--marked", "0,0", "--rounds", "2"]),
    ("analyze_moving8.json",
     ["analyze-moving", "--side", "8"]),
]


@pytest.mark.parametrize("golden_name,args", GOLDEN_JSON_CASES,
                         ids=[c[0] for c in GOLDEN_JSON_CASES])
def test_json_commands_match_golden(tmp_path, golden_name, args):
    out = tmp_path / golden_name
    assert run_cli(args + ["--out", str(out)]) == 0
    json_numbers_close(_read_json(out), _read_json(GOLDEN / golden_name))


def test_two_marked_reports_tiny_symmetry_residual(tmp_path):
    out = tmp_path / "pair.json"
    assert run_cli(["two-marked", "--side", "8", "--v1", "0,0", "--v2", "3,5",
                    "--t-max", "50", "--out", str(out)]) == 0
    assert _read_json(out)["symmetry_residual"] < 1e-10


def test_run_trace_matches_golden(tmp_path):
    out = tmp_path / "trace.csv"
    summary = tmp_path / "summary.json"
    code = run_cli(["run", "--family", "torus", "--side", "8", "--dims", "2",
                    "--shift", "flip-flop", "--marked", "0,0", "--t-max", "40",
                    "--out", str(out), "--summary", str(summary)])
    assert code == 0
    rows = _csv_rows(out)
    assert len(rows) == 41  # one row per step plus t = 0
    _csv_close(rows, _csv_rows(GOLDEN / "run_torus8.csv"))
    json_numbers_close(_read_json(summary), _read_json(GOLDEN / "run_torus8_summary.json"))


def test_csv_output_is_deterministic(tmp_path):
    args = ["run", "--family", "torus", "--side", "8", "--dims", "2",
            "--marked", "0,0", "--t-max", "25"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli(args + ["--out", str(a)]) == 0
    assert run_cli(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_predict_moving_exit_code():
    assert run_cli(["predict", "--family", "torus", "--side", "8",
                    "--shift", "moving", "--out", os.devnull]) == 3


def test_invalid_configuration_exit_code(capsys):
    code = run_cli(["predict", "--family", "torus", "--side", "4", "--dims", "3",
                    "--shift", "dirac"])
    assert code == 2
    assert "2D torus" in capsys.readouterr().err


def test_unknown_flag_rejected():
    with pytest.raises(SystemExit) as info:
        run_cli(["predict", "--family", "torus", "--side", "4", "--frobnicate"])
    assert info.value.code == 2


def test_io_failure_exit_code(tmp_path):
    missing_dir = tmp_path / "not" / "here" / "out.json"
    assert run_cli(["predict", "--family", "torus", "--side", "8",
                    "--out", str(missing_dir)]) == 4


def test_config_file_supplies_defaults(tmp_path):
    cfg = tmp_path / "walk.toml"
    cfg.write_text('family = "torus"\nside = 4\ndims = 2\n'
                   'shift = "flip_flop"  # comment\n', encoding="utf-8")
    out = tmp_path / "out.json"
    assert run_cli(["spectrum", "--config", str(cfg), "--out", str(out)]) == 0
    json_numbers_close(_read_json(out), _read_json(GOLDEN / "spectrum_torus4.json"))


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "walk.toml"
    cfg.write_text('side = 4\n', encoding="utf-8")
    out = tmp_path / "out.json"
    assert run_cli(["spectrum", "--family", "torus", "--dims", "2", "--side", "6",
                    "--config", str(cfg), "--out", str(out)]) == 0
    assert _read_json(out)["spectrum"]["n_vertices"] == 36


def test_console_entry_point():
    result = subprocess.run(
        [sys.executable, "-m", "walklab.cli", "spectrum", "--family", "complete",
         "--n", "8"],
        capture_output=True, text=True, check=True)
    doc = json.loads(result.stdout)
    assert doc["schema"] == 1
    assert doc["spectrum"]["retained_dim"] == 2


def test_config_can_supply_t_max(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('family = "torus"\nside = 4\ndims = 2\nt_max = 5\n',
                   encoding="utf-8")
    out = tmp_path / "trace.csv"
    assert run_cli(["run", "--config", str(cfg), "--out", str(out)]) == 0
    assert len(_csv_rows(out)) == 6
    assert run_cli(["run", "--family", "torus", "--side", "4", "--dims", "2",
                    "--out", str(out)]) == 2  # t-max missing entirely


def test_parse_vertex_errors():
    from walklab.cli import parse_vertex
    from walklab import ConfigurationError, torus_spec
    with pytest.raises(ConfigurationError):
        parse_vertex("1,2,3", torus_spec(4))
    with pytest.raises(ConfigurationError):
        parse_vertex("a,b", torus_spec(4))
    with pytest.raises(ConfigurationError):
        parse_vertex("99", torus_spec(4))
    assert parse_vertex("3,1", torus_spec(4)) == 7


def test_flat_toml_errors(tmp_path):
    from walklab.cli import load_flat_toml
    from walklab import ConfigurationError
    bad = tmp_path / "bad.toml"
    bad.write_text("just words\n", encoding="utf-8")
    with pytest.raises(ConfigurationError, match="key = value"):
        load_flat_toml(bad)
    bad.write_text("key = {nested}\n", encoding="utf-8")
    with pytest.raises(ConfigurationError, match="cannot parse"):
        load_flat_toml(bad)


def test_flat_toml_values(tmp_path):
    from walklab.cli import load_flat_toml
    cfg = tmp_path / "c.toml"
    cfg.write_text('a = 1\nb = 2.5\nc = "x"\nd = true\ne = [1, 2]\n'
                   'hy-phen = 3\n# comment only\n', encoding="utf-8")
    assert load_flat_toml(cfg) == {"a": 1, "b": 2.5, "c": "x", "d": True,
                                   "e": [1, 2], "hy_phen": 3}


def test_sweep_hypercube_and_moving(tmp_path):
    out = tmp_path / "hc.json"
    assert run_cli(["sweep", "--family", "hypercube", "--sides", "5,6,7",
                    "--out", str(out)]) == 0
    doc = _read_json(out)
    assert [row["n_vertices"] for row in doc["sweep"]["rows"]] == [32, 64, 128]

    out = tmp_path / "mv.json"
    assert run_cli(["sweep", "--family", "torus", "--dims", "2",
                    "--shift", "moving", "--sides", "8,12,16",
                    "--out", str(out)]) == 0
    doc = _read_json(out)
    assert all("prediction" not in row for row in doc["sweep"]["rows"])


def test_config_can_choose_family(tmp_path):
    cfg = tmp_path / "hc.toml"
    cfg.write_text('family = "hypercube"\ndegree = 4\n', encoding="utf-8")
    out = tmp_path / "out.json"
    assert run_cli(["spectrum", "--config", str(cfg), "--out", str(out)]) == 0
    assert _read_json(out)["spectrum"]["family"] == "hypercube"
