import csv
import json

import pytest

from synclab import __version__
from synclab.errors import BudgetError, InvalidParameterError, UsageError
from synclab.experiments import RUNNERS
from synclab.plot import emit_plot
from synclab.records import RunRecord, fmt, records_to_csv
from synclab.sweep import SweepConfig, marker_path, run_sweep

SWEEP_TOML = """
experiment = "advantage"
output = "out/adv.csv"
workers = 2

[grid]
L = [1, 2, 3]
lambda = [0.5, 0.7, 0.9]

[fixed]
n = 4
D = 3
samples = 500
seed = 11
"""

METRIC_COLS = ("point", "L", "lambda", "adv_squared", "stderr", "seed", "tool_version")


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_config(tmp_path, text=SWEEP_TOML):
    path = tmp_path / "sweep.toml"
    path.write_text(text)
    return path


def test_record_validation():
    with pytest.raises(InvalidParameterError):
        RunRecord("x", {"seed": 1}, {"made_up": 1.0})
    with pytest.raises(InvalidParameterError):
        RunRecord("x", {}, {"f_t": 1.0})
    rec = RunRecord("x", {"n": 3, "seed": 2}, {"f_t": 0.1}, extra={"arm": "null"})
    row = rec.row()
    assert list(row)[:1] == ["experiment"] and row["arm"] == "null"
    assert row["tool_version"] == __version__ and rec.seed == 2


def test_fmt_round_trips():
    for v in (0.1, 1 / 3, 1e-300, 2.0**60 + 1.5):
        assert float(fmt(v)) == v
    assert fmt(None) == "" and fmt(3) == "3"


def test_records_to_csv_header():
    text = records_to_csv(RUNNERS["thresholds"]({"L": 11}))
    header = text.splitlines()[0].split(",")
    assert header[:2] == ["experiment", "n"] and "seed" in header and header[-1] == "tool_version"


def test_sweep_rows_and_rerun(tmp_path):
    cfg = SweepConfig.from_toml(write_config(tmp_path))
    out = run_sweep(cfg)
    rows = read_csv(out)
    assert len(rows) == 9
    assert [int(r["point"]) for r in rows] == list(range(9))
    assert [(r["L"], r["lambda"]) for r in rows[:3]] == [("1", "0.5"), ("1", "0.69999999999999996"), ("1", "0.90000000000000002")]
    assert not marker_path(out).exists()
    again = read_csv(run_sweep(SweepConfig.from_toml(write_config(tmp_path))))
    assert [[r[c] for c in METRIC_COLS] for r in rows] == [[r[c] for c in METRIC_COLS] for r in again]


def test_sweep_thread_count_does_not_change_values(tmp_path, monkeypatch):
    a = read_csv(run_sweep(SweepConfig.from_toml(write_config(tmp_path))))
    monkeypatch.setenv("SYNCLAB_THREADS", "1")
    b = read_csv(run_sweep(SweepConfig.from_toml(write_config(tmp_path))))
    assert [r["adv_squared"] for r in a] == [r["adv_squared"] for r in b]


def test_sweep_resumes(tmp_path, monkeypatch):
    cfg = SweepConfig.from_toml(write_config(tmp_path))
    full = read_csv(run_sweep(cfg))

    # pretend the first four points finished before an interruption
    marker = marker_path(cfg.output)
    with marker.open("w") as fh:
        for i in range(4):
            rows = [RUNNERS["advantage"](cfg.points()[i])[0].row()]
            fh.write(json.dumps({"point": i, "rows": rows}) + "\n")
    calls = []
    real = RUNNERS["advantage"]

    def counting(p):
        calls.append(p)
        return real(p)

    monkeypatch.setitem(RUNNERS, "advantage", counting)
    resumed = read_csv(run_sweep(cfg))
    assert len(calls) == 5
    assert [r["adv_squared"] for r in resumed] == [r["adv_squared"] for r in full]


def test_sweep_budget_refusal(tmp_path):
    path = write_config(tmp_path, SWEEP_TOML.replace("workers = 2", "workers = 2\nbudget = 8"))
    cfg = SweepConfig.from_toml(path)
    with pytest.raises(BudgetError):
        run_sweep(cfg)
    assert not cfg.output.exists() and not marker_path(cfg.output).exists()


def test_sweep_config_errors(tmp_path):
    with pytest.raises(InvalidParameterError):
        SweepConfig.from_toml(write_config(tmp_path, SWEEP_TOML.replace('"advantage"', '"nope"')))
    with pytest.raises(InvalidParameterError):
        SweepConfig.from_toml(write_config(tmp_path, 'experiment = "pca"\n[grid]\nn = [10]\n'))
    with pytest.raises(InvalidParameterError):
        SweepConfig("pca", {"n": []}, tmp_path / "x.csv")


@pytest.fixture
def sweep_csv(tmp_path):
    return run_sweep(SweepConfig.from_toml(write_config(tmp_path)))


def test_plot_svg(sweep_csv, tmp_path):
    out = emit_plot(sweep_csv, tmp_path / "adv.svg", "lambda", "adv_squared", series="L", log_y=True)
    svg = out.read_text()
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert svg.count("<polyline") == 3
    assert "seed=11" in svg and f"tool_version={__version__}" in svg
    assert "L=2" in svg


def test_plot_errors_write_nothing(sweep_csv, tmp_path):
    target = tmp_path / "bad.svg"
    with pytest.raises(UsageError):
        emit_plot(sweep_csv, target, "lambda", "missing")
    empty = tmp_path / "empty.csv"
    empty.write_text("lambda,adv_squared\n")
    with pytest.raises(UsageError):
        emit_plot(empty, target, "lambda", "adv_squared")
    with pytest.raises(UsageError):
        emit_plot(tmp_path / "absent.csv", target, "lambda", "adv_squared")
    assert not target.exists()
