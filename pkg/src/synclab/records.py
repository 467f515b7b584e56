"""Experiment records and their CSV form."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

from synclab import __version__
from synclab.errors import InvalidParameterError

PARAM_KEYS = ("n", "L", "lambda", "D", "kappa", "c", "M", "seed", "trials")

METRICS = frozenset(
    {
        "acceptance_rate",
        "ci_low",
        "ci_high",
        "mean_statistic",
        "threshold",
        "accepted",
        "null_rate",
        "null_ci_low",
        "null_ci_high",
        "alt_rate",
        "alt_ci_low",
        "alt_ci_high",
        "per_sample_fp",
        "union_bound",
        "mean_overlap",
        "overlap_stderr",
        "mean_top_eig",
        "top_eig_stderr",
        "adv_squared",
        "stderr",
        "f_t",
        "composed",
        "single",
        "predicted",
        "bound",
        "lower",
        "upper",
    }
)


def fmt(value) -> str:
    """17 significant digits for floats, plain text otherwise."""
    if isinstance(value, float):
        return format(value, ".17g")
    return "" if value is None else str(value)


@dataclass
class RunRecord:
    experiment: str
    params: dict
    metrics: dict
    wall_time_ms: int = 0
    tool_version: str = __version__
    extra: dict = field(default_factory=dict)  # non-numeric labels such as arm or estimator

    def __post_init__(self):
        unknown = set(self.metrics) - METRICS
        if unknown:
            raise InvalidParameterError(f"unregistered metric names: {sorted(unknown)}")
        if "seed" not in self.params:
            raise InvalidParameterError("a run record must carry its seed")

    @property
    def seed(self) -> int:
        return self.params["seed"]

    def row(self) -> dict:
        out = {"experiment": self.experiment}
        out.update({k: self.params.get(k) for k in PARAM_KEYS})
        out.update(self.extra)
        out.update(self.metrics)
        out["wall_time_ms"] = self.wall_time_ms
        out["tool_version"] = self.tool_version
        return out


def header_for(records: list[RunRecord]) -> list[str]:
    cols: list[str] = []
    for r in records:
        for k in r.row():
            if k not in cols:
                cols.append(k)
    return cols


def write_rows(rows: list[dict], fieldnames: list[str], handle) -> None:
    writer = csv.DictWriter(handle, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: fmt(row.get(k)) for k in fieldnames})


def records_to_csv(records: list[RunRecord], path: str | Path | None = None) -> str:
    buf = io.StringIO()
    write_rows([r.row() for r in records], header_for(records), buf)
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text
