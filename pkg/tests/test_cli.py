import numpy as np

from ldpcsched.cli import main
from ldpcsched.codes import QcBaseMatrix, write_qc
from ldpcsched.sim import parse_csv

QC_TEXT = write_qc(QcBaseMatrix(rows=3, cols=6, z=8, entries=[
    [0, 5, 1, 7, 2, 4],
    [3, 0, 6, 2, 5, 1],
    [1, 4, 0, 6, 3, 7],
]))


def write_code(tmp_path):
    path = tmp_path / "code.qc"
    path.write_text(QC_TEXT, encoding="ascii")
    return path


def base_args(tmp_path, out="fer.csv"):
    return ["--code", str(write_code(tmp_path)), "--code-format", "qc",
            "--ebno-db", "1.0", "--max-iters", "5", "--frames", "40",
            "--min-errors", "0", "--seed", "3", "--out", str(tmp_path / out)]


def test_cli_basic_run(tmp_path, capsys):
    rc = main(base_args(tmp_path) + ["--schedule", "lbp"])
    assert rc == 0
    records = parse_csv((tmp_path / "fer.csv").read_text())
    assert len(records) == 5  # one row per iteration cap
    assert {r.schedule for r in records} == {"lbp"}


def test_cli_deterministic_output(tmp_path):
    argv = base_args(tmp_path) + ["--schedule", "lbp,arbp"]
    assert main(argv) == 0
    first = (tmp_path / "fer.csv").read_bytes()
    assert main(argv) == 0
    assert (tmp_path / "fer.csv").read_bytes() == first


def test_cli_usage_errors(tmp_path, capsys):
    assert main(["--bogus"]) == 2
    assert main([]) == 2
    assert main(base_args(tmp_path) + ["--schedule", "nope"]) == 2
    assert main(base_args(tmp_path) + ["--schedule", "pnw-arbp", "--p", "0"]) == 2
    capsys.readouterr()


def test_cli_bad_ebno_list(tmp_path, capsys):
    argv = base_args(tmp_path) + ["--schedule", "lbp"]
    i = argv.index("--ebno-db")
    argv[i + 1] = "1.0,zap"
    assert main(argv) == 2
    capsys.readouterr()


def test_cli_missing_code_file(tmp_path, capsys):
    argv = base_args(tmp_path) + ["--schedule", "lbp"]
    argv[1] = str(tmp_path / "nope.qc")
    assert main(argv) == 1
    assert "error" in capsys.readouterr().err


def test_cli_trace_output(tmp_path):
    argv = base_args(tmp_path) + ["--schedule", "rbp",
                                  "--trace", str(tmp_path / "trace.csv")]
    assert main(argv) == 0
    lines = (tmp_path / "trace.csv").read_text().splitlines()
    assert lines[0] == "step,kind,check,var,residual"
    assert len(lines) > 1
    step, kind, check, var, res = lines[1].split(",")
    assert step == "0" and kind == "edge"
    assert 0 <= int(check) < 24 and 0 <= int(var) < 48
    assert float(res) >= 0.0


def test_cli_pnw_runs(tmp_path):
    argv = base_args(tmp_path) + ["--schedule", "pnw-arbp", "--p", "8"]
    assert main(argv) == 0
    records = parse_csv((tmp_path / "fer.csv").read_text())
    assert {r.schedule for r in records} == {"pnw-arbp-p8"}


def test_cli_diagnose(tmp_path, capsys):
    argv = base_args(tmp_path) + ["--schedule", "lbp",
                                  "--diagnose", "lbp,nw-arbp",
                                  "--diagnose-out", str(tmp_path / "diag.csv")]
    assert main(argv) == 0
    text = (tmp_path / "diag.csv").read_text()
    assert text.startswith("ebno_db,frame,ref_unsat_checks,ref_bit_errors,")
    bad = base_args(tmp_path) + ["--schedule", "lbp", "--diagnose", "lbp"]
    assert main(bad) == 2
    bad = base_args(tmp_path) + ["--schedule", "lbp", "--diagnose", "lbp,nw-arbp"]
    assert main(bad) == 2  # missing --diagnose-out
    capsys.readouterr()
