import json
import subprocess
import sys

import pytest

from zlab.cli import main, parse_args
from zlab.errors import UsageError


def _err_lines(capsys):
    err = capsys.readouterr().err
    return [json.loads(line) for line in err.splitlines() if line.strip()]


def test_eval_prints_value(capsys):
    assert main(["eval", "--sigma", "2", "--t", "0"]) == 0
    re, im = capsys.readouterr().out.split()
    assert float(re) == pytest.approx(1.6449340668482264, abs=1e-12)
    assert float(im) == 0


def test_pole_is_a_domain_error(capsys):
    assert main(["eval", "--sigma", "1", "--t", "0"]) == 2
    (line,) = _err_lines(capsys)
    assert line["error"] == "domain"


def test_missing_required_flag_names_it(capsys):
    assert main(["eval", "--t", "1"]) == 2
    (line,) = _err_lines(capsys)
    assert line["error"] == "usage" and line["flag"] == "--sigma"


def test_unknown_command_and_bad_flag(capsys):
    assert main(["frobnicate"]) == 2
    assert main(["eval", "--sigma", "x", "--t", "1"]) == 2
    assert main([]) == 2
    lines = _err_lines(capsys)
    assert all(line["error"] == "usage" for line in lines)


def test_bad_tolerance_is_usage(capsys):
    assert main(["eval", "--sigma", "2", "--t", "0", "--tol", "-1"]) == 2


def test_theta_and_z_tables(capsys):
    assert main(["theta", "--t", "100", "200"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "t,theta" and len(out) == 3
    assert main(["z", "--from", "14", "--to", "14.2", "--step", "0.1"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "t,Z,residual_imag" and len(out) == 4


def test_zeros_command(capsys, tmp_path):
    assert main(["zeros", "--to", "100"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 30 and out[1].startswith("14.134725")
    target = tmp_path / "z.csv"
    assert main(["zeros", "--from", "10", "--to", "30", "--out", str(target), "--format", "csv"]) == 0
    assert len(target.read_text().splitlines()) == 4


def test_mean_command(capsys):
    assert main(["mean", "--sigma", "2", "--T", "100", "--delta", "1"]) == 0
    assert float(capsys.readouterr().out) > 0.658


def test_lemma2_record_to_directory(tmp_path, capsys):
    assert main(["lemma2", "--T", "1000", "--out", str(tmp_path), "--format", "both"]) == 0
    files = sorted(p.suffix for p in tmp_path.iterdir())
    assert files == [".csv", ".json"]
    rec = json.loads(next(tmp_path.glob("*.json")).read_text())
    assert rec["name"] == "lemma2" and rec["verdict"] == "pass"
    assert set(rec) == {"name", "inputs", "computed", "reference", "verdict", "runtime_seconds", "notes"}


def test_lemma2_sweep_to_stdout(capsys):
    assert main(["lemma2", "--T", "1000", "10000", "--C", "0", "1"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["name"] == "lemma2-sweep"


def test_bound_fail_verdict_exit_code(capsys):
    # an impossible slack forces a fail verdict
    code = main(["bound", "--grid-min", "1000", "--grid-max", "1020", "--slack", "-10"])
    assert code == 1
    assert json.loads(capsys.readouterr().out)["verdict"] == "fail"


def test_config_file_and_precedence(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"command": "eval", "sigma": 2, "t": 0, "tol": "1e-9"}))
    rc = parse_args(["--config", str(cfg)])
    assert rc.command == "eval" and rc.parameters["sigma"] == 2 and rc.parameters["tol"] == 1e-9
    rc = parse_args(["eval", "--config", str(cfg), "--sigma", "3"])
    assert rc.parameters["sigma"] == 3
    cfg.write_text(json.dumps({"bogus": 1}))
    with pytest.raises(UsageError):
        parse_args(["eval", "--config", str(cfg)])
    cfg.write_text("not json")
    with pytest.raises(UsageError):
        parse_args(["eval", "--config", str(cfg)])


def test_config_keys_with_dashes(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"grid-min": 1000, "grid_max": 1010, "--H": 0.5}))
    rc = parse_args(["bound", "--config", str(cfg)])
    assert rc.parameters["grid_min"] == 1000 and rc.parameters["grid_max"] == 1010
    assert rc.parameters["H"] == 0.5


def test_save_config_round_trip(tmp_path, capsys):
    saved = tmp_path / "saved.json"
    assert main(["eval", "--sigma", "2", "--t", "0", "--save-config", str(saved)]) == 0
    first = capsys.readouterr().out
    doc = json.loads(saved.read_text())
    assert doc["command"] == "eval" and doc["sigma"] == 2
    assert main(["--config", str(saved)]) == 0
    assert capsys.readouterr().out == first


def test_report_summarises_records(tmp_path, capsys):
    assert main(["lemma2", "--T", "1000", "--out", str(tmp_path / "a.json")]) == 0
    assert main(["bound", "--grid-min", "1000", "--grid-max", "1010", "--slack", "-10",
                 "--out", str(tmp_path / "b.json")]) == 1
    capsys.readouterr()
    assert main(["report", str(tmp_path)]) == 1
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "file,name,verdict,runtime_seconds" and len(out) == 3
    (tmp_path / "junk.json").write_text("[]")
    assert main(["report", str(tmp_path)]) == 2


def test_warnings_are_json_lines(capsys):
    assert main(["zeros", "--to", "500", "--grid-step", "5"]) == 0
    lines = _err_lines(capsys)
    assert lines and lines[0]["warning"] == "GridTooCoarse"


def test_convexity_command(capsys):
    assert main(["convexity", "--sigma", "0.75", "--T", "1000"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["computed"]["anchor_J_holds"]


def test_convexity_pole_rectangle(capsys):
    assert main(["convexity", "--sigma", "0.75", "--T", "0"]) == 2
    assert _err_lines(capsys)[-1]["type"] == "InvalidRectangle"


def test_search_and_explore(capsys):
    assert main(["search", "--sigma", "0.75", "--grid-min", "100", "--grid-max", "110"]) == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == "informational"
    assert main(["explore-z", "--target", "const:1", "--grid-min", "100", "--grid-max", "105",
                 "--mode", "absZ"]) == 0
    assert json.loads(capsys.readouterr().out)["name"] == "explore-z"


def test_density_command(capsys):
    assert main(["density", "--sigma", "0.25", "--eps", "0.5", "--T-max", "100"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["computed"]["n_samples"] == 400


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "zlab", "eval", "--sigma", "0", "--t", "0"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert float(proc.stdout.split()[0]) == pytest.approx(-0.5, abs=1e-12)
