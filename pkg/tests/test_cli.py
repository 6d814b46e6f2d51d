import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from mbp4.cli import EXIT_FAIL, EXIT_IO, EXIT_OK, EXIT_USAGE, main, parse_range
from mbp4.codes import load_check_matrix
from mbp4.pauli import PauliString

from .conftest import PATTERN_A, PATTERN_D


@pytest.fixture(scope="module")
def surf5_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("codes") / "surf5.qcode"
    assert main(["code", "gen", "--family", "surface", "--L", "5", "-o", str(path)]) == EXIT_OK
    return path


@pytest.fixture(scope="module")
def surf7_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("codes") / "surf7.qcode"
    assert main(["code", "gen", "--family", "surface", "--L", "7", "-o", str(path)]) == EXIT_OK
    return path


def fields(text):
    return dict(line.split(": ", 1) for line in text.strip().splitlines() if ": " in line)


def test_parse_range():
    grid = parse_range("1.0:0.5:0.01")
    assert len(grid) == 51
    assert grid[0] == 1.0 and grid[-1] == 0.5 and grid[1] == 0.99
    assert all(a > b for a, b in zip(grid, grid[1:]))
    assert parse_range("0.01,0.02") == [0.01, 0.02]
    assert parse_range("0.1:0.3:0.1") == [0.1, 0.2, 0.3]


def test_code_gen_and_info(surf5_file, capsys):
    code = load_check_matrix(surf5_file)
    assert code.checks.paulis.shape == (24, 25)
    capsys.readouterr()
    assert main(["code", "info", str(surf5_file)]) == EXIT_OK
    info = fields(capsys.readouterr().out)
    assert info["K"] == "1" and info["N"] == "25" and info["rank"] == "24"
    assert main(["code", "info", "toric:4", "--json"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["K"] == 2
    assert main(["code", "load", str(surf5_file)]) == EXIT_OK
    assert "K=1" in capsys.readouterr().out


def test_code_gen_stdout_sparse(capsys):
    assert main(["code", "gen", "--family", "five-qubit", "--sparse"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.strip()


@pytest.mark.slow
def test_code_gen_large_bicycle(tmp_path):
    path = tmp_path / "b.qcode"
    argv = ["code", "gen", "--family", "bicycle", "--n", "3786", "--k-logical", "946", "--row-weight", "16",
            "--seed", "7", "--no-logicals", "-o", str(path)]  # fmt: skip
    assert main(argv) == EXIT_OK
    code = load_check_matrix(path)
    assert code.m == 2840 and code.n == 3786
    assert set(np.count_nonzero(code.checks.paulis, axis=1)) == {16}


def test_decode_five_qubit(capsys):
    rc = main(["decode", "--code", "513", "--error", "IIIYI", "--alpha", "1.0", "--eps", "0.003"])
    assert rc == EXIT_FAIL
    assert fields(capsys.readouterr().out)["status"] == "FAIL"
    rc = main(["decode", "--code", "513", "--error", "IIIYI", "--alpha", "1.5", "--eps", "0.003"])
    out = fields(capsys.readouterr().out)
    assert rc == EXIT_OK and out["status"] == "CONVERGE"
    assert out["outcome"] in ("exact", "degenerate")


def test_decode_surface7_pattern_d(surf7_file, capsys):
    error = str(PauliString.from_sparse(PATTERN_D, 49))
    rc = main(["decode", "--code", str(surf7_file), "--error", error, "--alpha", "0.65",
               "--schedule", "serial", "--eps", "0.014"])  # fmt: skip
    out = fields(capsys.readouterr().out)
    assert rc == EXIT_OK and out["status"] == "CONVERGE" and out["outcome"] == "degenerate"


def test_decode_syndrome_and_trace(tmp_path, capsys):
    trace = tmp_path / "t.csv"
    rc = main(["decode", "--code", "513", "--syndrome", "1011", "--alpha", "1.5", "--eps0", "0.003",
               "--trace", str(trace)])  # fmt: skip
    out = fields(capsys.readouterr().out)
    assert "outcome" not in out
    rows = list(csv.reader(open(trace)))
    assert rows[0] == ["iter", "J_S_bounded", "J_S_mismatch"]
    assert len(rows) - 1 == int(out["iterations"])
    assert rc in (EXIT_OK, EXIT_FAIL)


def test_decode_adaptive_reports_alpha(capsys):
    error = str(PauliString.from_sparse(PATTERN_A, 49))
    rc = main(["decode", "--code", "surface:7", "--error", error, "--alpha-grid", "1.0,0.65", "--schedule", "serial",
               "--eps", "0.014", "--tmax", "50"])  # fmt: skip
    out = fields(capsys.readouterr().out)
    assert rc == EXIT_OK and out["alpha_used"] == "0.65"
    assert out["iterations_total"] == str(50 + int(out["iterations"]))


@pytest.mark.parametrize(
    "argv",
    [
        ["decode", "--code", "513", "--error", "IIQYI", "--eps", "0.01"],
        ["decode", "--code", "513", "--error", "IIYI", "--eps", "0.01"],
        ["decode", "--code", "513", "--syndrome", "10", "--eps", "0.01"],
        ["decode", "--code", "513", "--error", "IIIYI"],
        ["decode", "--code", "513", "--error", "IIIYI", "--syndrome", "0000", "--eps", "0.1"],
        ["decode", "--code", "513", "--error", "IIIYI", "--eps", "0.1", "--bogus"],
        ["simulate", "--code", "513", "--eps-list", "0.0,0.1"],
        ["code", "gen", "--family", "surface"],
        ["threshold", "--family", "toric", "--sizes", "4,x", "--eps-list", "0.1"],
        [],
    ],
)
def test_usage_errors(argv, capsys):
    assert main(argv) == EXIT_USAGE


def test_io_errors(tmp_path, capsys):
    assert main(["code", "info", str(tmp_path / "missing.qcode")]) == EXIT_IO
    bad = tmp_path / "bad.qcode"
    bad.write_text("XZ\nZQ\n")
    assert main(["code", "info", str(bad)]) == EXIT_IO
    assert main(["simulate", "--code", "513", "--eps-list", "0.1", "--events", "3", "--threads", "1",
                 "-o", str(tmp_path / "no" / "dir.csv")]) == EXIT_IO  # fmt: skip


def test_simulate_csv_deterministic(tmp_path, capsys):
    argv = ["simulate", "--code", "513", "--eps-list", "0.02,0.05", "--alpha", "1.5", "--eps0", "0.003",
            "--events", "20", "--seed", "4"]  # fmt: skip
    assert main(argv + ["--threads", "1", "-o", str(tmp_path / "a.csv")]) == EXIT_OK
    assert main(argv + ["--threads", "2", "-o", str(tmp_path / "b.csv")]) == EXIT_OK
    a = (tmp_path / "a.csv").read_bytes()
    assert a == (tmp_path / "b.csv").read_bytes()
    rows = list(csv.DictReader(a.decode().splitlines()))
    assert [float(r["eps"]) for r in rows] == [0.02, 0.05]
    assert all(int(r["n_e"]) == 20 for r in rows)


def test_simulate_json_metadata(tmp_path, capsys):
    out = tmp_path / "r.json"
    argv = ["simulate", "--code", "toric:4", "--eps-list", "0.05", "--alpha-grid", "1.0:0.5:0.25",
            "--schedule", "serial", "--events", "5", "--max-trials", "400", "--threads", "1", "-o", str(out)]  # fmt: skip
    assert main(argv) == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["metadata"]["max_trials"] == 400
    assert payload["metadata"]["decoder"]["alpha_grid"] == [1.0, 0.75, 0.5]
    (point,) = payload["points"]
    assert point["alpha"] == "adaptive" and point["L_or_N"] == 4


def test_simulate_linear_domain_matches_log(capsys):
    base = ["simulate", "--code", "513", "--eps-list", "0.05", "--alpha", "1.5", "--events", "15",
            "--threads", "1", "--seed", "2"]  # fmt: skip
    assert main(base) == EXIT_OK
    log_out = capsys.readouterr().out
    assert main(base + ["--domain", "linear"]) == EXIT_OK
    lin_out = capsys.readouterr().out
    strip = lambda s: [r.split(",")[6:10] for r in s.splitlines()]  # noqa: E731
    assert strip(log_out) == strip(lin_out)


def test_threshold_rows(capsys):
    argv = ["threshold", "--family", "toric", "--sizes", "4,6", "--eps-list", "0.1", "--alpha", "0.75",
            "--schedule", "serial", "--events", "5", "--max-trials", "300", "--threads", "1"]  # fmt: skip
    assert main(argv) == EXIT_OK
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert [r["code"] for r in rows] == ["toric:4", "toric:6"]
    assert [r["L_or_N"] for r in rows] == ["4", "6"]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mbp4.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "0.1.0" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "mbp4.cli", "decode", "--code", "513", "--error", "IIIYI",
                           "--eps", "0.003"], capture_output=True, text=True)  # fmt: skip
    assert proc.returncode == EXIT_FAIL
