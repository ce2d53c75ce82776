from __future__ import annotations

import csv
import gzip
import io
import math
import subprocess
import sys
from pathlib import Path

import pytest

from mcdim.cli import main, parse_complex, parse_n, parse_window
from mcdim.errors import ConfigError
from mcdim.sweep import SweepRow, read_rows

FIXTURES = Path(__file__).parent / "fixtures"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def dim_value(out):
    return float(out.split()[1])


def test_parsers():
    assert parse_complex("0.03+0.0i") == 0.03
    assert parse_complex("-0.02i") == -0.02j
    assert parse_complex("0.01-0.02i") == 0.01 - 0.02j
    assert parse_n("4..10") == (4, 10)
    assert parse_n("7") == (7, 7)
    assert parse_window("-1,1,-2,2") == (-1, 1, -2, 2)
    for bad in ("x", "1+", "0.1j", "nan", ""):
        with pytest.raises(ConfigError):
            parse_complex(bad)
    for bad in ("a..b", "5..3", "0"):
        with pytest.raises(ConfigError):
            parse_n(bad)
    with pytest.raises(ConfigError):
        parse_window("1,2,3")


def test_predict(capsys):
    code, out, _ = run(capsys, "predict", "--Q", "3", "--p", "0.1")
    assert code == 0
    assert out.strip() == "1.0091024"


def test_dim_p0(capsys, tmp_path):
    path = tmp_path / "d.csv"
    code, out, _ = run(capsys, "dim", "--Q", "3", "--p", "0", "--n", "4..10", "--out", str(path))
    assert code == 0
    assert abs(dim_value(out) - 1) < 1e-4
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["n", "D_n", "residual"]
    assert [int(r[0]) for r in rows[1:]] == list(range(4, 11))
    assert abs(float(rows[1][1]) - math.log(80) / (4 * math.log(3))) < 1e-15


def test_dim_examples(capsys):
    code, out, _ = run(capsys, "dim", "--Q", "4", "--p", "0.03+0.0i", "--n", "5..9")
    assert code == 0
    excess = 0.0009 / math.log(4)
    assert abs(dim_value(out) - (1 + excess)) <= 0.1 * excess
    code, out, _ = run(capsys, "dim", "--Q", "3", "--p", "0.05", "--n", "6..12")
    assert code == 0
    excess = 0.0025 / math.log(3)
    assert abs(dim_value(out) - (1 + excess)) <= 0.1 * excess
    code, out, _ = run(capsys, "dim", "--Q", "3", "--p", "0.02i", "--n", "6")
    assert code == 0 and "bowen_fixed_n" in out


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "dim", "--Q", "2")[0] == 2
    assert run(capsys, "dim", "--p", "abc")[0] == 2
    assert run(capsys, "dim", "--n", "9..3")[0] == 2
    assert run(capsys, "render", "--window", "1,0,0,1")[0] == 2
    assert run(capsys, "render", "--res", "8")[0] == 2
    assert run(capsys, "dim", "--tol", "-1")[0] == 2
    assert run(capsys, "dim", "--n", "20")[0] == 2  # above the point cap
    assert run(capsys, "dim", "--p", "0.01,0.02")[0] == 2
    code, _, err = run(capsys, "dim", "--p", "0.5", "--n", "4")
    assert code == 3 and "regime" in err
    code, _, err = run(capsys, "dim", "--p", "0.01", "--n", "4", "--out",
                       str(tmp_path / "missing" / "x.csv"))
    assert code == 4 and "I/O" in err
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2


def test_verify_default_passes(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) >= 10
    for line in lines:
        parts = line.split()
        assert parts[0] == "CHECK" and parts[2] == "pass" and len(parts) == 5


def test_verify_q5_passes(capsys):
    code, out, _ = run(capsys, "verify", "--Q", "5")
    assert code == 0
    assert " fail " not in out


def test_verify_coarse_truncation_fails(capsys):
    code, out, _ = run(capsys, "verify", "--trunc", "5")
    assert code == 1
    failed = [l.split() for l in out.splitlines() if l.split()[2] == "fail"]
    names = {f[1] for f in failed}
    assert {"phi_functional_equation", "U1_functional_equation", "U2_functional_equation"} <= names
    for f in failed:
        assert float(f[3]) > float(f[4])


def test_sweep_q5(capsys, tmp_path):
    path = tmp_path / "s.csv"
    code, out, _ = run(capsys, "sweep", "--Q", "5", "--p", "0.02,0.04", "--n", "4..8",
                       "--out", str(path), "--workers", "2")
    assert code == 0
    rows = read_rows(path.open())
    assert [r.p for r in rows] == [0.02, 0.04]
    assert all(r.Q == 5 and r.n_max == 8 and r.D_boxcount is None for r in rows)
    a = float(out.split()[1])
    assert abs(a - 1 / math.log(5)) <= 0.15 / math.log(5)
    header = path.read_text().splitlines()[0]
    assert header.startswith("p_re,p_im,Q,n_max,D_bowen,D_predicted,D_boxcount")
    # byte-identical on a rerun with another worker count
    path2 = tmp_path / "s2.csv"
    run(capsys, "sweep", "--Q", "5", "--p", "0.02,0.04", "--n", "4..8", "--out", str(path2),
        "--workers", "1")
    assert path.read_bytes() == path2.read_bytes()


def test_sweep_to_stdout_with_boxcount(capsys):
    code, out, err = run(capsys, "sweep", "--Q", "3", "--p", "0.03", "--n", "4..6", "--res", "512")
    assert code == 0
    rows = read_rows(io.StringIO(out))
    assert len(rows) == 1 and rows[0].D_boxcount is not None
    assert abs(rows[0].D_boxcount - 1) < 0.15
    assert err.startswith("a11 ")


def test_sweep_row_validation():
    with pytest.raises(ConfigError):
        SweepRow(0.01, 0, 3, 8, 2.5, 1.0, None, 0.0)


def test_render_matches_golden(capsys, tmp_path):
    path = tmp_path / "q3.ppm"
    code, out, _ = run(capsys, "render", "--Q", "3", "--p", "0.005", "--out", str(path))
    assert code == 0
    assert out.split() == ["boundary_components", "1", "encloses_origin", "True",
                           "infinity_touches_all_borders", "True"]
    with gzip.open(FIXTURES / "render_q3_p0.005.ppm.gz", "rb") as fh:
        assert path.read_bytes() == fh.read()


def test_render_env_workers(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("MCDIM_WORKERS", "3")
    a, b = tmp_path / "a.ppm", tmp_path / "b.ppm"
    assert run(capsys, "render", "--Q", "4", "--p", "0.01", "--res", "200", "--out", str(a))[0] == 0
    monkeypatch.setenv("MCDIM_WORKERS", "1")
    assert run(capsys, "render", "--Q", "4", "--p", "0.01", "--res", "200", "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    monkeypatch.setenv("MCDIM_WORKERS", "-2")
    assert run(capsys, "render", "--res", "64", "--out", str(a))[0] == 2


def test_boxcount_small(capsys):
    code, out, _ = run(capsys, "boxcount", "--Q", "3", "--p", "0.05", "--res", "1024")
    assert code == 0
    assert abs(float(out.split()[1]) - 1) < 0.05


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "mcdim", "predict", "--Q", "5", "--p", "0.1i"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.strip() == f"{1 + 0.01 / math.log(5):.7f}"
    res = subprocess.run([sys.executable, "-m", "mcdim", "predict", "--Q", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 2
