import json
import subprocess
import sys

import numpy as np
import pytest

from oils.cli import main
from oils.generate import generate_random_system
from oils.sysfile import dumps


def run(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def planted_file(tmp_path):
    g = generate_random_system(10, 4, 0.01, np.random.default_rng(5))
    path = tmp_path / "planted.txt"
    path.write_text(dumps(g.A, g.b))
    return path, g.x_star


@pytest.mark.parametrize("mode", ["simple", "sequential", "parallel"])
def test_solve_planted(planted_file, capsys, mode):
    path, x_star = planted_file
    code, out, _ = run(["solve", str(path), "--mode", mode, "--seed", "3"], capsys)
    assert code == 0
    rec = json.loads(out)
    assert rec["status"] == "Enclosure"
    assert set(rec) >= {"status", "box", "iterations", "subsquares_used", "seed"}
    assert rec["seed"] == 3
    box = np.array(rec["box"])
    assert (box[:, 0] <= x_star).all() and (x_star <= box[:, 1]).all()


def test_solve_infeasible_with_start_box(tmp_path, capsys):
    path = tmp_path / "one.txt"
    path.write_text("1 1\n1 1\n4 6\n")
    code, out, _ = run(["solve", str(path), "--x0", "[[0, 3]]", "--seed", "0"], capsys)
    assert code == 2
    rec = json.loads(out)
    assert rec["status"] == "ProvenUnsolvable" and rec["box"] is None


def test_solve_inconclusive(tmp_path, capsys):
    path = tmp_path / "zero.txt"
    path.write_text("2 1\n-1 1\n-1 1\n1 1\n1 1\n")
    code, out, _ = run(["solve", str(path), "--seed", "0"], capsys)
    assert code == 3
    rec = json.loads(out)
    assert rec["status"] == "Inconclusive"
    # unbounded endpoints are spelled out so the line stays strict JSON
    assert rec["box"] == [["-inf", "inf"]]
    code, out, _ = run(["solve", str(path), "--mode", "sequential", "--seed", "0"], capsys)
    assert code == 3


def test_malformed_file(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("1 1\n1 oops\n0 0\n")
    code, _, err = run(["solve", str(path)], capsys)
    assert code == 1
    assert "line 2, column 3" in err


def test_missing_file_and_bad_usage(capsys):
    assert run(["solve", "/nonexistent/file"], capsys)[0] == 1
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["solve", "x", "--eps", "abc"])
    assert info.value.code == 1


def test_bad_x0(planted_file, capsys):
    path, _ = planted_file
    assert run(["solve", str(path), "--x0", "[[0, 1]]"], capsys)[0] == 1
    assert run(["solve", str(path), "--x0", "nonsense"], capsys)[0] == 1


def test_seed_from_environment(planted_file, capsys, monkeypatch):
    path, _ = planted_file
    monkeypatch.setenv("SUBSQ_SEED", "41")
    _, out, _ = run(["solve", str(path)], capsys)
    assert json.loads(out)["seed"] == 41
    monkeypatch.setenv("SUBSQ_SEED", "x")
    assert run(["solve", str(path)], capsys)[0] == 1


def test_gen_then_solve_and_hull(tmp_path, capsys):
    path = tmp_path / "g.txt"
    assert run(["gen", "6", "3", "--seed", "2", "--radius", "0.05", "-o", str(path)], capsys)[0] == 0
    text = path.read_text()
    assert text.startswith("# seed 2")
    g = generate_random_system(6, 3, 0.05, np.random.default_rng(2))
    assert text == dumps(g.A, g.b, text.split("\n6 3\n")[0].replace("# ", ""))
    code, out, _ = run(["hull", str(path)], capsys)
    assert code == 0
    hull = np.array(json.loads(out)["box"])
    code, out, _ = run(["solve", str(path), "--seed", "1"], capsys)
    box = np.array(json.loads(out)["box"])
    assert (box[:, 0] <= hull[:, 0] + 1e-7).all() and (hull[:, 1] <= box[:, 1] + 1e-7).all()


def test_hull_infeasible(tmp_path, capsys):
    path = tmp_path / "u.txt"
    path.write_text("2 1\n1 1\n1 1\n1 1\n2 2\n")
    code, out, _ = run(["hull", str(path)], capsys)
    assert code == 2
    assert json.loads(out)["status"] == "Infeasible"


def test_bench_csv(capsys):
    args = ["bench", "table1", "--sizes", "4x2", "--trials", "3", "--seed", "1"]
    code, out, _ = run(args, capsys)
    assert code == 0
    header, row = out.strip().split("\n")
    cols = header.split(",")
    assert {"seed", "m", "n", "radius", "trials", "av_w_ratio", "av_v_ratio"} <= set(cols)
    assert dict(zip(cols, row.split(",")))["seed"] == "1"
    assert run(args, capsys)[1] == out


def test_bench_bad_sizes(capsys):
    assert run(["bench", "table3", "--sizes", "ten"], capsys)[0] == 1
    assert run(["bench", "table3", "--sizes", "3x5"], capsys)[0] == 1


def test_module_entry_point(planted_file):
    path, _ = planted_file
    proc = subprocess.run(
        [sys.executable, "-m", "oils.cli", "solve", str(path), "--seed", "0"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["status"] == "Enclosure"
