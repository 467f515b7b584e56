"""Noise splitting and the one-sided test built on a weak-recovery estimator.

Given Y_l and an independent GUE matrix Z_l, the pair

    A_l = (Y_l + kappa Z_l) / sqrt(1 + kappa^2),
    B_l = (Y_l - Z_l / kappa) / sqrt(1 + kappa^-2)

has independent GUE noise parts.  If Y_l carries spike coefficient
mu = lam sqrt(1 + kappa^2), then A_l carries lam and B_l carries lam kappa.
An estimator X built from the A channels is checked against B_1 through the
statistic <X, B_1>, which is N(0, ||X||_F^2) under the null.
"""

from __future__ import annotations

import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm
from statsmodels.stats.proportion import proportion_confint

from synclab import rng as _rng
from synclab.errors import DegenerateEstimatorError, InvalidParameterError
from synclab.estimators import rank_one_from_top
from synclab.model import (
    JointObservation,
    ModelParams,
    attach_external,
    sample_null,
    sample_planted,
    signal_for,
)
from synclab.records import RunRecord

ESTIMATORS = ("oracle_signal", "pca_channel1")


@dataclass(frozen=True)
class SplitChannels:
    a: list[np.ndarray]
    b: list[np.ndarray]
    kappa: float


@dataclass(frozen=True)
class TestOutcome:
    __test__ = False  # not a pytest class

    statistic: float
    threshold: float

    @property
    def decision(self) -> int:
        return int(self.statistic >= self.threshold)


def split_channels(joint: JointObservation, kappa: float) -> SplitChannels:
    if not kappa > 0:
        raise InvalidParameterError(f"kappa must be positive, got {kappa}")
    sa = math.sqrt(1 + kappa**2)
    sb = math.sqrt(1 + kappa**-2)
    ys = joint.observation.channels
    a = [(y + kappa * z) / sa for y, z in zip(ys, joint.external)]
    b = [(y - z / kappa) / sb for y, z in zip(ys, joint.external)]
    return SplitChannels(a, b, kappa)


def planted_split_snr(lambda_a: float, kappa: float) -> tuple[float, float]:
    """(mu, b_spike): source SNR giving A-channel SNR lambda_a, and the B-channel spike coefficient."""
    if lambda_a < 0 or not kappa > 0:
        raise InvalidParameterError("need lambda_a >= 0 and kappa > 0")
    return lambda_a * math.sqrt(1 + kappa**2), lambda_a * kappa


def decision_threshold(x_norm: float, n: int, lam: float, kappa: float, c: float) -> float:
    """(c lam ||X||_F / 4) sqrt((1 + kappa^2) n / (1 + kappa^-2)) = c lam ||X||_F kappa sqrt(n) / 4."""
    return c * lam * x_norm / 4 * math.sqrt((1 + kappa**2) * n / (1 + kappa**-2))


def one_sided_test(
    x_hat: np.ndarray, b1: np.ndarray, lam: float, kappa: float, c: float, extra_b: list | None = None
) -> TestOutcome:
    """Statistic <x_hat, b1> against the threshold; ``extra_b`` pools further (X, B) pairs."""
    if not 0 < c <= 1:
        raise InvalidParameterError(f"c must lie in (0, 1], got {c}")
    x_norm = float(np.linalg.norm(x_hat))
    if x_norm == 0.0:
        raise DegenerateEstimatorError("estimator has zero Frobenius norm")
    stat = float(np.real(np.vdot(x_hat, b1)))
    for x_l, b_l in extra_b or []:
        stat += float(np.real(np.vdot(x_l, b_l)))
    return TestOutcome(stat, decision_threshold(x_norm, b1.shape[0], lam, kappa, c))


def null_false_positive(n: int, lam: float, kappa: float, c: float) -> tuple[float, float]:
    """Exact null acceptance probability for a fixed estimator and its sub-Gaussian bound."""
    z = c * lam * kappa * math.sqrt(n) / 4
    return float(norm.sf(z)), math.exp(-(c**2) * lam**2 * kappa**2 * n / 32)


@dataclass(frozen=True)
class OneSidedPipeline:
    """Estimator from the A channels, test on B_1 (optionally pooled over all l)."""

    kappa: float = 1.0
    c: float = 0.5
    estimator: str = "oracle_signal"
    pool_channels: bool = False
    solver: str = "lanczos"

    def __post_init__(self):
        if self.estimator not in ESTIMATORS:
            raise InvalidParameterError(f"estimator must be one of {ESTIMATORS}")
        if not self.kappa > 0:
            raise InvalidParameterError("kappa must be positive")
        if not 0 < self.c <= 1:
            raise InvalidParameterError("c must lie in (0, 1]")

    def run(self, params: ModelParams, trial: int, arm: int, planted: bool) -> TestOutcome:
        """One observation: planted at the source SNR, or null; then split and test."""
        mu, _ = planted_split_snr(params.lam, self.kappa)
        source = ModelParams(params.n, params.L, mu, params.seed)
        if planted:
            x, obs = sample_planted(source, trial, arm)
        else:
            obs = sample_null(source, trial, arm)
            # the oracle estimator under the null is a signal independent of the data
            x = signal_for(source, trial, arm)
        split = split_channels(attach_external(obs, trial=trial, arm=arm), self.kappa)
        if self.estimator == "oracle_signal":
            xs = [np.outer(v, v.conj()) for v in (np.exp(1j * ell * x.phases) for ell in range(1, params.L + 1))]
        else:
            xs = [rank_one_from_top(a, solver=self.solver) for a in split.a]
        extra = list(zip(xs[1:], split.b[1:])) if self.pool_channels else None
        return one_sided_test(xs[0], split.b[0], params.lam, self.kappa, self.c, extra)


def _workers(workers: int | None) -> int:
    return max(1, int(workers or 1))


def _run_arm(pipe, params, trials, arm, planted, workers) -> list[TestOutcome]:
    def one(t):
        return pipe.run(params, t, arm, planted)

    if _workers(workers) == 1:
        return [one(t) for t in range(trials)]
    with ThreadPoolExecutor(_workers(workers)) as pool:
        return list(pool.map(one, range(trials)))


def wilson(successes: int, trials: int) -> tuple[float, float]:
    lo, hi = proportion_confint(successes, trials, alpha=0.05, method="wilson")
    return float(lo), float(hi)


def _params_dict(params: ModelParams, pipe: OneSidedPipeline, trials: int, M: int | None = None) -> dict:
    return {
        "n": params.n,
        "L": params.L,
        "lambda": params.lam,
        "kappa": pipe.kappa,
        "c": pipe.c,
        "M": M,
        "seed": params.seed,
        "trials": trials,
    }


def roc_experiment(
    params: ModelParams,
    kappa: float = 1.0,
    c: float = 0.5,
    trials: int = 1000,
    estimator: str = "oracle_signal",
    pool_channels: bool = False,
    workers: int | None = None,
) -> list[RunRecord]:
    """Acceptance rates of the one-sided test under the planted and null joint laws.

    ``params.lam`` is the A-channel SNR; observations are drawn at the source
    SNR from :func:`planted_split_snr`.  Returns [planted record, null record].
    """
    if trials < 100:
        raise InvalidParameterError("trials must be >= 100")
    if params.lam / (1 + kappa**2) >= 1:
        warnings.warn(
            f"lambda / (1 + kappa^2) = {params.lam / (1 + kappa**2):.3g} >= 1; the split is outside its intended regime",
            stacklevel=2,
        )
    pipe = OneSidedPipeline(kappa, c, estimator, pool_channels)
    out = []
    for arm_name, arm, planted in (("planted", _rng.ARM_PLANTED, True), ("null", _rng.ARM_NULL, False)):
        start = time.perf_counter()
        outcomes = _run_arm(pipe, params, trials, arm, planted, workers)
        hits = sum(o.decision for o in outcomes)
        lo, hi = wilson(hits, trials)
        metrics = {
            "acceptance_rate": hits / trials,
            "ci_low": lo,
            "ci_high": hi,
            "accepted": hits,
            "mean_statistic": float(np.mean([o.statistic for o in outcomes])),
            "threshold": float(np.mean([o.threshold for o in outcomes])),
        }
        out.append(
            RunRecord(
                "roc",
                _params_dict(params, pipe, trials),
                metrics,
                int(1000 * (time.perf_counter() - start)),
                extra={"arm": arm_name, "estimator": estimator},
            )
        )
    return out


def hidden_sample_detection(
    params: ModelParams,
    M: int,
    trials: int,
    test: OneSidedPipeline | None = None,
    workers: int | None = None,
) -> RunRecord:
    """Composed test over M samples: fire iff any per-sample test fires.

    Null trials see M null samples; alternative trials see one planted sample
    at a uniformly drawn hidden index among M - 1 null samples.  Sample j of
    trial i uses trial index i*M + j, so M = 1 replays :func:`roc_experiment`.
    """
    if M < 1:
        raise InvalidParameterError("M must be >= 1")
    if trials < 1:
        raise InvalidParameterError("trials must be >= 1")
    pipe = test or OneSidedPipeline()
    start = time.perf_counter()

    def null_trial(i):
        return [pipe.run(params, i * M + j, _rng.ARM_NULL, False).decision for j in range(M)]

    def alt_trial(i):
        k = int(_rng.substream(params.seed, _rng.TAG_HIDDEN_INDEX, i).integers(M))
        fired = 0
        for j in range(M):
            if j == k:
                fired |= pipe.run(params, i * M + j, _rng.ARM_PLANTED, True).decision
            else:
                fired |= pipe.run(params, i * M + j, _rng.ARM_ALT_NULL, False).decision
        return fired

    if _workers(workers) == 1:
        nulls = [null_trial(i) for i in range(trials)]
        alts = [alt_trial(i) for i in range(trials)]
    else:
        with ThreadPoolExecutor(_workers(workers)) as pool:
            nulls = list(pool.map(null_trial, range(trials)))
            alts = list(pool.map(alt_trial, range(trials)))
    null_hits = sum(any(d) for d in nulls)
    alt_hits = sum(alts)
    eps = sum(sum(d) for d in nulls) / (trials * M)
    nlo, nhi = wilson(null_hits, trials)
    alo, ahi = wilson(alt_hits, trials)
    metrics = {
        "null_rate": null_hits / trials,
        "null_ci_low": nlo,
        "null_ci_high": nhi,
        "alt_rate": alt_hits / trials,
        "alt_ci_low": alo,
        "alt_ci_high": ahi,
        "per_sample_fp": eps,
        "union_bound": M * eps,
    }
    return RunRecord(
        "hidden_sample",
        _params_dict(params, pipe, trials, M),
        metrics,
        int(1000 * (time.perf_counter() - start)),
        extra={"estimator": pipe.estimator},
    )
