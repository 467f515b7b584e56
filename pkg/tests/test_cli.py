import csv
import io

import pytest

from synclab import __version__
from synclab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_thresholds(capsys):
    code, out, _ = run(capsys, "thresholds", "--L", "11")
    assert code == 0
    (row,) = rows(out)
    assert abs(float(row["upper"]) - 0.9793661772388039) <= 1e-12
    assert row["lower_source"] == "formula" and row["tool_version"] == __version__
    code, out, _ = run(capsys, "thresholds", "--L", "2")
    assert rows(out)[0]["lower"] == "0.93700000000000006" and rows(out)[0]["lower_source"] == "cited"


def test_advantage_row(capsys):
    code, out, _ = run(capsys, "advantage", "quadrature", "--n", "2", "--L", "1", "--lambda", "0.5", "--D", "1")
    assert code == 0
    (row,) = rows(out)
    assert list(row)[:8] == ["method", "n", "L", "lambda", "D", "samples", "adv_squared", "stderr"]
    assert row["method"] == "quadrature" and abs(float(row["adv_squared"]) - 1.25) <= 1e-12


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "advantage", "bogus", "--n", "2", "--lambda", "1", "--D", "1")[0] == 1
    assert run(capsys, "simulate", "--n", "0", "--lambda", "1", "--out", str(tmp_path / "x.json"))[0] == 1
    assert run(capsys, "advantage", "quadrature", "--n", "5", "--lambda", "1", "--D", "1")[0] == 1
    assert run(capsys, "advantage", "surrogate", "--n", "5", "--lambda", "1.2", "--D", "2", "--mode", "full")[0] == 2
    assert run(capsys, "thresholds", "--L", "1")[0] == 2
    assert run(capsys, "pca", "--in", str(tmp_path / "missing.json"))[0] == 1
    assert run(capsys, "pca")[0] == 1
    assert run(capsys, "reduction", "hidden", "--n", "10", "--lambda", "0.5")[0] == 1
    assert run(capsys, "interpolate", "--n", "4", "--lambda", "0.5", "--D", "2", "--t-grid", "a,b")[0] == 1
    code, _, err = run(capsys, "plot", "--csv", str(tmp_path / "none.csv"), "--x", "a", "--y", "b", "--out", str(tmp_path / "p.svg"))
    assert code == 1 and "error" in err


def test_simulate_byte_identical_and_pca(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(capsys, "simulate", "--n", "6", "--L", "2", "--lambda", "1.5", "--seed", "3", "--with-phases", "--out", str(path))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    code, out, _ = run(capsys, "pca", "--in", str(a), "--channel", "2", "--solver", "power")
    assert code == 0
    row = rows(out)[0]
    assert 0 <= float(row["overlap"]) <= 1 + 1e-12 and row["channel"] == "2"
    assert run(capsys, "pca", "--in", str(a), "--channel", "3")[0] == 1


def test_experiment_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "pca", "--n", "30", "--lambda", "2", "--trials", "3")
    assert code == 0 and float(rows(out)[0]["mean_overlap"]) > 0.3
    code, out, _ = run(capsys, "interpolate", "--n", "8", "--L", "1", "--lambda", "0.5", "--D", "2", "--t-grid", "0,4,8", "--samples", "200")
    assert code == 0 and [r["t"] for r in rows(out)] == ["0", "4", "8"]
    code, out, _ = run(capsys, "toy", "--kind", "gaussian_mean_shift", "--lambda", "1", "--D", "2", "--M", "2")
    assert code == 0 and abs(float(rows(out)[0]["adv_squared_basis"]) - 2.5) <= 1e-12
    code, out, _ = run(capsys, "reduction", "roc", "--n", "20", "--lambda", "0.5", "--trials", "100")
    assert code == 0 and [r["arm"] for r in rows(out)] == ["planted", "null"]
    out_path = tmp_path / "h.csv"
    assert run(capsys, "reduction", "hidden", "--n", "20", "--lambda", "0.5", "--trials", "10", "--M", "2", "--out", str(out_path))[0] == 0
    assert rows(out_path.read_text())[0]["M"] == "2"


def test_sweep_and_plot(capsys, tmp_path):
    cfg = tmp_path / "s.toml"
    cfg.write_text('experiment = "thresholds"\noutput = "t.csv"\n[grid]\nL = [2, 3, 11]\n')
    code, out, _ = run(capsys, "sweep", str(cfg))
    assert code == 0 and out.strip().endswith("t.csv")
    svg = tmp_path / "t.svg"
    assert run(capsys, "plot", "--csv", str(tmp_path / "t.csv"), "--x", "L", "--y", "upper", "--out", str(svg))[0] == 0
    assert svg.read_text().startswith("<svg")


def test_version(capsys):
    with pytest.raises(SystemExit):
        main(["--version"])
    assert __version__ in capsys.readouterr().out
