import csv

import numpy as np

from duelbench.cli import main
from duelbench.envs import save_matrix_file


def test_unknown_experiment_fails(capsys):
    assert main(["run", "--experiment", "nope", "--seed", "1",
                 "--out", "/tmp/x"]) == 1
    assert "unknown experiment" in capsys.readouterr().err


def test_run_and_aggregate_roundtrip(tmp_path, capsys):
    out = tmp_path / "runs"
    code = main(["run", "--experiment", "copeland_exp3", "--horizon", "60",
                 "--iterations", "2", "--seed", "42", "--out", str(out)])
    assert code == 0
    printed = capsys.readouterr().out.strip().splitlines()
    assert printed and printed[0].endswith("copeland_exp3_copeland5_60.csv")
    agg = tmp_path / "agg.csv"
    assert main(["aggregate", "--in", str(out), "--out", str(agg)]) == 0
    with open(agg) as fh:
        rows = list(csv.DictReader(fh))
    assert rows[0]["experiment"] == "copeland_exp3_copeland5"
    assert all(r["count"] == "2" for r in rows)


def test_run_rejects_bad_override(tmp_path, capsys):
    code = main(["run", "--experiment", "copeland_exp3", "--iterations", "0",
                 "--seed", "1", "--out", str(tmp_path)])
    assert code == 1
    assert "iterations" in capsys.readouterr().err


def test_verify_lemma_command(capsys):
    assert main(["verify-lemma", "--n-max", "4"]) == 0
    out = capsys.readouterr().out
    assert "bound holds" in out
    assert "n=4: max found 24.0" in out


def test_solve_command(tmp_path, capsys):
    path = tmp_path / "rps.txt"
    save_matrix_file(path, np.array([[0, 1, -1], [-1, 0, 1], [1, -1, 0]]))
    assert main(["solve", "--matrix", str(path)]) == 0
    out = capsys.readouterr().out
    assert "game value: 0.000000" in out
    assert "arm 1: 0.333333" in out


def test_solve_missing_file(capsys):
    assert main(["solve", "--matrix", "/nonexistent/m.txt"]) == 1
    assert "error" in capsys.readouterr().err
