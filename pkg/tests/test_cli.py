import json
import subprocess
import sys

import numpy as np
import pytest

from quadstop.cli import main
from quadstop.dataio import load_boundary_csv, save_boundary_csv
from quadstop.problem import StarBoundary

LIGHT_VERIFY = ["--paths", "2000", "--time-step", "4e-3", "--scan-n", "10",
                "--n-rays", "240"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_kernel_green_value(capsys):
    code, out, _ = run(capsys, "kernel", "green", "--r", "0.5", "--d", "3",
                       "--dist", "1.0")
    assert code == 0
    assert out.strip() == "0.0585498315243"


def test_kernel_martin_value(capsys):
    code, out, _ = run(capsys, "kernel", "martin", "--r", "1", "--d", "2",
                       "--a", "1,0", "--y", "2,0")
    assert code == 0
    assert out.strip() == "%.12g" % np.exp(np.sqrt(2.0) * 2.0)


def test_oracle_sym_radius(capsys):
    code, out, _ = run(capsys, "oracle", "sym-radius", "--r", "0.5", "--d", "3")
    assert code == 0
    assert out.strip() == "2.98470458536"


def test_solve_writes_outputs(tmp_path, capsys):
    out_csv = tmp_path / "b.csv"
    rep_json = tmp_path / "b.json"
    code, out, _ = run(capsys, "solve", "--r", "1", "--lambdas", "1,4",
                       "--n", "32", "--out", str(out_csv), "--report", str(rep_json))
    assert code == 0
    assert "converged=True" in out
    b = load_boundary_csv(out_csv)
    assert b.grid.n == 32
    doc = json.loads(rep_json.read_text())
    assert doc["kind"] == "solve_report"
    assert doc["solve_report"]["converged"] is True
    assert doc["radii_min"] >= np.sqrt(5.0)


def test_solve_reruns_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for f in (a, b):
        code, _, _ = run(capsys, "solve", "--r", "1", "--lambdas", "1,4",
                         "--n", "32", "--out", str(f),
                         "--report", str(f) + ".json")
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_solve_non_convergence_exit_2(tmp_path, capsys):
    out_csv = tmp_path / "b.csv"
    code, out, _ = run(capsys, "solve", "--r", "1", "--lambdas", "1,9",
                       "--n", "32", "--max-iterations", "2",
                       "--homotopy-steps", "0",
                       "--out", str(out_csv), "--report", str(out_csv) + ".json")
    assert code == 2
    assert "converged=False" in out
    assert out_csv.exists()  # partial result still written for inspection


def test_solve_rejects_bad_lambda(capsys):
    code, _, err = run(capsys, "solve", "--r", "1", "--lambdas", "1,-4")
    assert code == 1
    assert "error:" in err


def test_solve_requires_problem(capsys):
    code, _, err = run(capsys, "solve", "--n", "32")
    assert code == 1
    assert "boundary metadata" in err


def test_verify_pass_and_shrunk_detection(tmp_path, capsys):
    out_csv = tmp_path / "b.csv"
    code, _, _ = run(capsys, "solve", "--r", "1", "--lambdas", "1,1",
                     "--n", "64", "--out", str(out_csv),
                     "--report", str(out_csv) + ".json")
    assert code == 0

    rep = tmp_path / "v.json"
    code, out, _ = run(capsys, "verify", "--boundary", str(out_csv),
                       "--report", str(rep), *LIGHT_VERIFY)
    assert code == 0
    assert "residual: pass" in out
    doc = json.loads(rep.read_text())
    assert all(doc["checks"].values())

    b = load_boundary_csv(out_csv)
    from quadstop.dataio import read_problem_csv
    p = read_problem_csv(out_csv)
    shrunk = tmp_path / "shrunk.csv"
    save_boundary_csv(shrunk, p, StarBoundary(b.grid, 0.8 * b.radii))
    code, out, _ = run(capsys, "verify", "--boundary", str(shrunk),
                       "--report", str(tmp_path / "v2.json"), *LIGHT_VERIFY)
    assert code == 3
    assert "FAIL" in out


def test_verify_missing_file(tmp_path, capsys):
    code, _, err = run(capsys, "verify", "--boundary", str(tmp_path / "nope.csv"),
                       "--report", str(tmp_path / "v.json"))
    assert code == 1
    assert "not found" in err


def test_plot_from_metadata(tmp_path, capsys):
    out_csv = tmp_path / "b.csv"
    run(capsys, "solve", "--r", "1", "--lambdas", "1,4", "--n", "32",
        "--out", str(out_csv), "--report", str(out_csv) + ".json")
    svg = tmp_path / "b.svg"
    code, out, _ = run(capsys, "plot", "--boundary", str(out_csv),
                       "--out", str(svg))
    assert code == 0
    assert svg.read_text().startswith("<svg")


def test_plot_empty_csv(tmp_path, capsys):
    f = tmp_path / "empty.csv"
    f.write_text("")
    code, _, err = run(capsys, "plot", "--boundary", str(f),
                       "--out", str(tmp_path / "b.svg"))
    assert code == 1
    assert "error:" in err


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "problem": {"r": 1.0, "lambdas": [1.0, 4.0]},
        "grid": {"n": 32},
        "output": {"boundary_csv": str(tmp_path / "from_cfg.csv"),
                   "report_json": str(tmp_path / "from_cfg.json")},
    }))
    code, _, _ = run(capsys, "solve", "--config", str(cfg))
    assert code == 0
    assert (tmp_path / "from_cfg.csv").exists()
    b_cfg = load_boundary_csv(tmp_path / "from_cfg.csv")
    assert b_cfg.grid.n == 32

    # a flag overrides the same setting from the file
    code, _, _ = run(capsys, "solve", "--config", str(cfg), "--n", "16",
                     "--out", str(tmp_path / "flag.csv"),
                     "--report", str(tmp_path / "flag.json"))
    assert code == 0
    assert load_boundary_csv(tmp_path / "flag.csv").grid.n == 16


def test_audit_report(tmp_path, capsys):
    out = tmp_path / "audit.json"
    code, text, _ = run(capsys, "audit", "--out", str(out))
    assert code == 0
    assert "conclusion:" in text
    doc = json.loads(out.read_text())
    assert doc["configs"]
    assert "delta_identity" in doc


def test_threads_flag_accepted(capsys):
    code, out, _ = run(capsys, "oracle", "sym-radius", "--threads", "1",
                       "--r", "1", "--d", "2")
    assert code == 0
    assert float(out.strip()) == pytest.approx(1.8274465007568879, rel=1e-10)


def test_help_exits_zero(capsys):
    assert main(["-h"]) == 0
    assert "usage:" in capsys.readouterr().out


def test_no_command_is_usage_error(capsys):
    assert main([]) == 1
    err = capsys.readouterr().err
    assert "usage:" in err and "error:" in err


def test_console_script_runs():
    out = subprocess.run(["quadstop", "oracle", "sym-radius", "--r", "0.5",
                          "--d", "3"], capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.strip() == "2.98470458536"


def test_module_invocation_matches_script():
    out = subprocess.run([sys.executable, "-c",
                          "from quadstop.cli import main; import sys;"
                          "sys.exit(main(['kernel', 'green', '--r', '0.5',"
                          "'--d', '3', '--dist', '1.0']))"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.strip() == "0.0585498315243"
