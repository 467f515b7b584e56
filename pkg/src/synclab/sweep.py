"""Grid sweeps from a TOML file, executed on a thread pool.

Example config::

    experiment = "pca"
    output = "pca.csv"
    workers = 2
    budget = 500

    [grid]
    L = [1, 2, 3]
    lambda = [0.5, 1.0, 1.5]

    [fixed]
    n = 200
    trials = 40
    seed = 1

Completed points are appended to ``<output>.inprogress`` as they finish; a
rerun skips them.  The final CSV lists rows in grid order and the marker file
is removed.
"""

from __future__ import annotations

import itertools
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from synclab.errors import BudgetError, InvalidParameterError
from synclab.experiments import RUNNERS
from synclab.records import write_rows

DEFAULT_BUDGET = 10_000
THREADS_ENV = "SYNCLAB_THREADS"


@dataclass
class SweepConfig:
    experiment: str
    grid: dict[str, list]
    output: Path
    fixed: dict = field(default_factory=dict)
    workers: int = 1
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.experiment not in RUNNERS:
            raise InvalidParameterError(f"unknown experiment {self.experiment!r}; choose from {sorted(RUNNERS)}")
        if not self.grid:
            raise InvalidParameterError("sweep grid is empty")
        for k, v in self.grid.items():
            if not isinstance(v, list) or not v:
                raise InvalidParameterError(f"grid entry {k!r} must be a non-empty list")
        self.output = Path(self.output)

    @classmethod
    def from_toml(cls, path: str | Path) -> "SweepConfig":
        path = Path(path)
        with path.open("rb") as fh:
            raw = tomllib.load(fh)
        try:
            output = Path(raw["output"])
            if not output.is_absolute():
                output = path.parent / output
            return cls(
                experiment=raw["experiment"],
                grid=dict(raw["grid"]),
                output=output,
                fixed=dict(raw.get("fixed", {})),
                workers=int(raw.get("workers", 1)),
                budget=int(raw.get("budget", DEFAULT_BUDGET)),
            )
        except KeyError as exc:
            raise InvalidParameterError(f"sweep config missing key {exc}") from None

    def points(self) -> list[dict]:
        keys = list(self.grid)
        return [dict(self.fixed, **dict(zip(keys, combo))) for combo in itertools.product(*self.grid.values())]

    def size(self) -> int:
        out = 1
        for v in self.grid.values():
            out *= len(v)
        return out

    def width(self) -> int:
        env = os.environ.get(THREADS_ENV)
        return max(1, int(env) if env else self.workers)


def marker_path(output: Path) -> Path:
    return output.with_name(output.name + ".inprogress")


def _load_done(marker: Path) -> dict[int, list[dict]]:
    done: dict[int, list[dict]] = {}
    if marker.exists():
        for line in marker.read_text().splitlines():
            if line.strip():
                entry = json.loads(line)
                done[entry["point"]] = entry["rows"]
    return done


def run_sweep(config: SweepConfig) -> Path:
    if config.size() > config.budget:
        raise BudgetError(f"sweep has {config.size()} points, budget is {config.budget}")
    points = config.points()
    runner = RUNNERS[config.experiment]
    marker = marker_path(config.output)
    done = _load_done(marker)
    todo = [i for i in range(len(points)) if i not in done]

    config.output.parent.mkdir(parents=True, exist_ok=True)
    with marker.open("a") as log, ThreadPoolExecutor(config.width()) as pool:
        futures = {pool.submit(runner, points[i]): i for i in todo}
        # this thread is the only writer
        for fut in as_completed(futures):
            i = futures[fut]
            rows = [r.row() for r in fut.result()]
            done[i] = rows
            log.write(json.dumps({"point": i, "rows": rows}) + "\n")
            log.flush()

    rows = [dict(point=i, **row) for i in range(len(points)) for row in done[i]]
    fieldnames: list[str] = []
    for row in rows:
        fieldnames.extend(k for k in row if k not in fieldnames)
    with config.output.open("w", newline="") as fh:
        write_rows(rows, fieldnames, fh)
    marker.unlink()
    return config.output
