"""Point runners shared by the CLI and the sweep executor.

Each runner takes a flat parameter dict (the sweep grid point merged with the
fixed settings) and returns one or more :class:`RunRecord`.
"""

from __future__ import annotations

import math
import time

import numpy as np

from synclab import rng as _rng
from synclab.advantage import (
    advantage_mc,
    advantage_quadrature,
    advantage_two_replica_mc,
    gaussian_surrogate,
    statistical_thresholds,
)
from synclab.errors import InvalidParameterError
from synclab.estimators import dense_top_eigenpair, lanczos_top_eigenpair, overlap_score
from synclab.model import ModelParams, lift_frequency, sample_planted
from synclab.records import RunRecord
from synclab.reduction import OneSidedPipeline, hidden_sample_detection, roc_experiment


def _model(p: dict) -> ModelParams:
    return ModelParams(int(p["n"]), int(p.get("L", 1)), float(p.get("lambda", 0.0)), int(p.get("seed", 0)))


def _base(p: dict, **extra) -> dict:
    out = {"n": p.get("n"), "L": p.get("L", 1), "lambda": p.get("lambda"), "seed": int(p.get("seed", 0))}
    out.update(extra)
    return out


def pca_experiment(params: ModelParams, trials: int, channel: int = 1, solver: str = "dense") -> dict:
    """Mean overlap of the channel's top eigenvector with x^(channel), and mean top eigenvalue / sqrt(n)."""
    if trials < 2:
        raise InvalidParameterError("trials must be >= 2")
    top = {"dense": dense_top_eigenpair, "lanczos": lanczos_top_eigenpair}.get(solver)
    if top is None:
        raise InvalidParameterError(f"unknown solver {solver!r}")
    overlaps, eigs = np.empty(trials), np.empty(trials)
    for t in range(trials):
        x, obs = sample_planted(params, t, _rng.ARM_PLANTED)
        pair = top(obs.channels[channel - 1])
        v = pair.vector
        target = lift_frequency(x, channel)
        overlaps[t] = abs(np.vdot(v, target)) ** 2 / params.n
        eigs[t] = pair.value / math.sqrt(params.n)
    return {
        "mean_overlap": float(overlaps.mean()),
        "overlap_stderr": float(overlaps.std(ddof=1) / math.sqrt(trials)),
        "mean_top_eig": float(eigs.mean()),
        "top_eig_stderr": float(eigs.std(ddof=1) / math.sqrt(trials)),
    }


def run_pca(p: dict) -> list[RunRecord]:
    start = time.perf_counter()
    trials = int(p.get("trials", 50))
    metrics = pca_experiment(_model(p), trials, int(p.get("channel", 1)), p.get("solver", "dense"))
    return [RunRecord("pca", _base(p, trials=trials), metrics, int(1000 * (time.perf_counter() - start)))]


def run_advantage(p: dict) -> list[RunRecord]:
    start = time.perf_counter()
    params = _model(p)
    D = int(p["D"])
    method = p.get("method", "mc")
    samples = int(p.get("samples", 10_000))
    if method == "mc":
        est = advantage_mc(params, D, samples, p.get("estimator", "mean"))
    elif method == "two-replica":
        est = advantage_two_replica_mc(params, D, samples)
    elif method == "quadrature":
        est = advantage_quadrature(params, D, int(p.get("points", 64)))
    elif method == "surrogate":
        est = gaussian_surrogate(params, D, p.get("mode", "truncated"))
    else:
        raise InvalidParameterError(f"unknown advantage method {method!r}")
    return [
        RunRecord(
            "advantage",
            _base(p, D=D, trials=est.samples),
            {"adv_squared": est.adv_squared, "stderr": est.stderr},
            int(1000 * (time.perf_counter() - start)),
            extra={"method": est.method},
        )
    ]


def run_roc(p: dict) -> list[RunRecord]:
    return roc_experiment(
        _model(p),
        float(p.get("kappa", 1.0)),
        float(p.get("c", 0.5)),
        int(p.get("trials", 1000)),
        p.get("estimator", "oracle_signal"),
        bool(p.get("pool_channels", False)),
    )


def run_hidden_sample(p: dict) -> list[RunRecord]:
    pipe = OneSidedPipeline(
        float(p.get("kappa", 1.0)), float(p.get("c", 0.5)), p.get("estimator", "oracle_signal")
    )
    return [hidden_sample_detection(_model(p), int(p["M"]), int(p.get("trials", 1000)), pipe)]


def run_thresholds(p: dict) -> list[RunRecord]:
    th = statistical_thresholds(int(p["L"]))
    return [
        RunRecord(
            "thresholds",
            {"L": th.L, "seed": int(p.get("seed", 0))},
            {"lower": th.lower, "upper": th.upper},
            extra={"lower_source": "cited" if th.lower_cited else "formula"},
        )
    ]


RUNNERS = {
    "pca": run_pca,
    "advantage": run_advantage,
    "roc": run_roc,
    "hidden_sample": run_hidden_sample,
    "thresholds": run_thresholds,
}
