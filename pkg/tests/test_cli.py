from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest

from l2cert.cli import csv_text, resolve_workers, run


def test_pi2_verify_all_entries_zero(capsys):
    code, rep = run(["pi2-verify"])
    assert code == 0 and rep["verdict"] == "OK"
    s = rep["summary"]
    assert s["zero_entries"] == s["entries"] == 6 * 8
    assert s["K_boundary3_equals_basis"] and s["columns"] == 8
    out = json.loads(capsys.readouterr().out)
    assert set(out) == {"config", "rows", "summary", "verdict"}
    assert out["config"]["tool_version"]


def test_betti_single_row(tmp_path):
    out = tmp_path / "r.json"
    code, rep = run(["betti", "--complex", "X", "--family", "sym:3..3", "-o", str(out)])
    assert code == 0
    rows = json.loads(out.read_text())["rows"]
    assert len(rows) == 1 and rows[0]["D"] == 216
    assert rows[0]["euler"] == 7 * 216
    assert sum((-1) ** p * k for p, k in enumerate(rows[0]["kernel"])) == 7 * 216


def test_kesten_outside_window_is_fail(capsys):
    # the ball compression at radius 6 sits below the requested window
    code, rep = run(["kesten", "--radius", "6", "--radii", "2,4,6"])
    s = rep["summary"]
    assert s["nondecreasing"] and s["below_limit"]
    assert 0.80 < s["estimate"] < 0.84
    assert code == 1 and rep["verdict"] == "FAIL"


@pytest.mark.parametrize("argv", [["betti", "--bogus"], ["nosuch"], ["kunneth", "--pair", "X,Y"], []])
def test_usage_errors_exit_above_two(argv, capsys):
    code, rep = run(argv)
    assert code > 2 and rep is None


def test_bad_descriptor_is_error_report(capsys):
    code, rep = run(["betti", "--family", "sym:"])
    assert code > 2 and rep["verdict"] == "ERROR"


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nfamily = cyclic:2\ncomplex = B\nreproducible = true\n")
    code, rep = run(["betti", "--config", str(cfg)])
    assert code == 0
    assert rep["config"]["family"] == "cyclic:2" and rep["rows"][0]["D"] == 2
    assert "seconds" not in rep["summary"]
    code, rep = run(["betti", "--config", str(cfg), "--family", "cyclic:3"])
    assert rep["rows"][0]["D"] == 3


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("nonsense = 1\n")
    assert run(["betti", "--config", str(cfg)])[0] > 2


def test_csv_columns(tmp_path):
    out = tmp_path / "r.csv"
    code, _ = run(["betti", "--complex", "B", "--family", "cyclic:2;sym:3", "--format", "csv", "-o", str(out)])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert list(rows[0]) == ["complex", "quotient_label", "D", "degree", "kernel_dim", "normalized",
                             "lowest_eigenvalues"]
    assert len(rows) == 2 * 2
    assert [int(r["kernel_dim"]) for r in rows if r["degree"] == "1"] == [3, 7]


def test_csv_generic_rows():
    text = csv_text({"rows": [{"radius": 2, "estimate": 0.5}, {"radius": 4, "estimate": 0.6}]})
    assert text.splitlines()[0] == "radius,estimate"


def test_reproducible_reports_byte_identical(tmp_path):
    path = tmp_path / "a.json"
    seen = []
    for w in ("1", "3"):
        assert run(["kunneth", "--pair", "B,B", "--family", "sym:3", "--reproducible", "--workers", w,
                    "-o", str(path)])[0] == 0
        seen.append(path.read_bytes())
    assert seen[0] == seen[1]


def test_workers_env_and_flag(monkeypatch):
    monkeypatch.setenv("L2CERT_WORKERS", "3")
    assert resolve_workers(None) == 3
    assert resolve_workers(2) == 2
    monkeypatch.delenv("L2CERT_WORKERS")
    assert resolve_workers(None) >= 1
    monkeypatch.setenv("L2CERT_WORKERS", "many")
    with pytest.raises(Exception):
        resolve_workers(None)


def test_build_x_writes_complex(tmp_path, capsys):
    from l2cert.complexes import parse_complex

    path = tmp_path / "k.txt"
    code, rep = run(["build-x", "--complex", "K", "--complex-out", str(path)])
    assert code == 0 and rep["rows"][0]["degrees"] == [1, 6, 12, 8]
    assert parse_complex(path.read_text()).degrees == (1, 6, 12, 8)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "l2cert", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "l2cert" in res.stdout
