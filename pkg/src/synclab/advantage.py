"""Low-degree advantage of the multi-frequency model.

For the Gaussian additive model with a uniform phase prior the squared
degree-D advantage has the closed form

    Adv^2 = E_x exp_{<=D}( (lam^2 / n) * sum_l |<x^(l), 1>|^2 )
          = E_theta exp_{<=D}( lam^2 * sum_l (U_l^2 + V_l^2) ),

with U_l, V_l the normalized sine and cosine sums.  This module estimates it
by plain Monte Carlo, by a two-replica Monte Carlo that never uses the
rotation-invariance reduction, and by tensor trapezoid quadrature for n <= 3.
The Gaussian surrogate replaces (U_l, V_l) by i.i.d. N(0, 1/2) variables in
the factorized (relaxed) integrand prod_l exp_{<=D}(lam^2 U_l^2) exp_{<=D}(lam^2 V_l^2).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Literal, NamedTuple

import numpy as np

from synclab import rng as _rng
from synclab.errors import BudgetError, DomainError, InvalidParameterError
from synclab.model import ModelParams, PhaseSignal

CHUNK = 2048
MOM_BLOCKS = 20
_BIG = 2.0**900

Estimator = Literal["mean", "median_of_means"]
Integrand = Literal["exact", "relaxed"]

CSV_FIELDS = ("method", "n", "L", "lambda", "D", "samples", "adv_squared", "stderr")


@dataclass(frozen=True)
class AdvantageEstimate:
    adv_squared: float
    stderr: float
    method: str
    n: int
    L: int
    lam: float
    D: int
    samples: int = 0

    def csv_row(self) -> dict:
        row = asdict(self)
        row["lambda"] = row.pop("lam")
        return {k: row[k] for k in CSV_FIELDS}


class UVStats(NamedTuple):
    u: np.ndarray
    v: np.ndarray


class ScaledFloat(NamedTuple):
    """mantissa * 2**exponent, for truncated exponentials beyond float range."""

    mantissa: float
    exponent: int

    def log(self) -> float:
        return math.log(self.mantissa) + self.exponent * math.log(2.0)


def exp_truncated(x: float, D: int) -> float | ScaledFloat:
    """sum_{k<=D} x^k / k!, via term_k = term_{k-1} * x / k.

    Once a partial term exceeds 2**900 the sum continues in a (mantissa,
    exponent) representation; the result is returned as a float when it fits
    and as a :class:`ScaledFloat` otherwise.
    """
    if D < 0:
        raise InvalidParameterError("D must be >= 0")
    term, total = 1.0, 1.0
    for k in range(1, D + 1):
        term = term * x / k
        if abs(term) > _BIG:
            return _exp_truncated_scaled(x, D)
        total += term
    return total


def _exp_truncated_scaled(x: float, D: int) -> float | ScaledFloat:
    tm, te = 1.0, 0  # term = tm * 2**te
    sm, se = 1.0, 0  # sum = sm * 2**se
    for k in range(1, D + 1):
        tm, e = math.frexp(tm * x / k)
        te += e
        if te >= se:
            sm, se = tm + math.ldexp(sm, se - te), te
        else:
            sm = sm + math.ldexp(tm, te - se)
        sm, e = math.frexp(sm)
        se += e
    try:
        return math.ldexp(sm, se)
    except OverflowError:
        return ScaledFloat(sm, se)


def exp_truncated_array(x: np.ndarray, D: int) -> np.ndarray:
    """Vectorized exp_{<=D}; no overflow guard (inputs here are bounded by lam^2 L n)."""
    x = np.asarray(x, dtype=float)
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, D + 1):
        term = term * x / k
        total = total + term
    return total


def uv_statistics(x: PhaseSignal, L: int) -> UVStats:
    if L < 1:
        raise InvalidParameterError("L must be >= 1")
    ell = np.arange(1, L + 1)[:, None]
    arg = ell * x.phases[None, :]
    scale = 1.0 / math.sqrt(x.n)
    return UVStats(scale * np.sin(arg).sum(axis=1), scale * np.cos(arg).sum(axis=1))


def frequency_sums(theta: np.ndarray, L: int) -> np.ndarray:
    """sum_t exp(i l theta_t) for l = 1..L along the last axis; shape (..., L)."""
    z = np.exp(1j * theta)
    zp = z.copy()
    out = np.empty(theta.shape[:-1] + (L,), dtype=complex)
    for ell in range(L):
        out[..., ell] = zp.sum(axis=-1)
        if ell + 1 < L:
            zp *= z
    return out


def _aggregate(values: np.ndarray, estimator: Estimator) -> tuple[float, float]:
    if estimator == "mean":
        return float(np.mean(values)), float(np.std(values, ddof=1) / math.sqrt(len(values)))
    if estimator == "median_of_means":
        blocks = np.array_split(values, MOM_BLOCKS)
        means = np.array([b.mean() for b in blocks])
        # asymptotic standard error of a median of B normal block means
        se = math.sqrt(math.pi / 2) * np.std(means, ddof=1) / math.sqrt(MOM_BLOCKS)
        return float(np.median(means)), float(se)
    raise InvalidParameterError(f"unknown estimator {estimator!r}")


def _integrand(
    sums: np.ndarray, n: int, lam: float, D: int, integrand: Integrand
) -> np.ndarray:
    lam2 = lam * lam
    if integrand == "exact":
        return exp_truncated_array(lam2 * np.sum(np.abs(sums) ** 2, axis=-1) / n, D)
    if integrand == "relaxed":
        u2 = sums.imag**2 / n
        v2 = sums.real**2 / n
        return np.prod(exp_truncated_array(lam2 * u2, D) * exp_truncated_array(lam2 * v2, D), axis=-1)
    raise InvalidParameterError(f"unknown integrand {integrand!r}")


def advantage_mc(
    params: ModelParams,
    D: int,
    samples: int,
    estimator: Estimator = "mean",
    integrand: Integrand = "exact",
) -> AdvantageEstimate:
    """Monte Carlo over fresh uniform phase vectors.

    ``integrand="exact"`` averages exp_{<=D}(lam^2 sum_l (U_l^2 + V_l^2)), whose
    expectation is Adv^2 itself.  ``integrand="relaxed"`` averages the
    factorized product, whose expectation upper-bounds Adv^2 and equals the
    interpolation endpoint F_0.
    """
    if samples < 100:
        raise InvalidParameterError("samples must be >= 100")
    n, L = params.n, params.L
    values = np.empty(samples)
    for c, start in enumerate(range(0, samples, CHUNK)):
        size = min(CHUNK, samples - start)
        gen = _rng.substream(params.seed, _rng.TAG_ADV, c)
        theta = 2 * np.pi * gen.random((size, n))
        values[start : start + size] = _integrand(frequency_sums(theta, L), n, params.lam, D, integrand)
    est, se = _aggregate(values, estimator)
    method = "mc_single" if integrand == "exact" else "mc_single_relaxed"
    return AdvantageEstimate(est, se, method, n, L, params.lam, D, samples)


def advantage_two_replica_mc(params: ModelParams, D: int, samples: int) -> AdvantageEstimate:
    """Average of exp_{<=D}((lam^2/n) sum_l |<x^(l), x'^(l)>|^2) over independent pairs."""
    if samples < 100:
        raise InvalidParameterError("samples must be >= 100")
    n, L = params.n, params.L
    values = np.empty(samples)
    for c, start in enumerate(range(0, samples, CHUNK)):
        size = min(CHUNK, samples - start)
        g1 = _rng.substream(params.seed, _rng.TAG_ADV_REPLICA, 2 * c)
        g2 = _rng.substream(params.seed, _rng.TAG_ADV_REPLICA, 2 * c + 1)
        x = np.exp(2j * np.pi * g1.random((size, n)))
        y = np.exp(2j * np.pi * g2.random((size, n)))
        overlap = np.empty((size, L), dtype=complex)
        xp, yp = x.copy(), y.copy()
        for ell in range(L):
            overlap[:, ell] = np.sum(xp * yp.conj(), axis=1)
            xp *= x
            yp *= y
        values[start : start + size] = exp_truncated_array(
            params.lam**2 * np.sum(np.abs(overlap) ** 2, axis=1) / n, D
        )
    est, se = _aggregate(values, "mean")
    return AdvantageEstimate(est, se, "mc_two_replica", n, L, params.lam, D, samples)


def advantage_quadrature(params: ModelParams, D: int, points_per_dim: int = 64) -> AdvantageEstimate:
    """Periodic trapezoid tensor quadrature over [0, 2pi)^n; deterministic, n <= 3."""
    n, L = params.n, params.L
    if n > 3:
        raise BudgetError(f"tensor quadrature supports n <= 3, got n = {n}")
    if points_per_dim < 8:
        raise InvalidParameterError("points_per_dim must be >= 8")
    nodes = 2 * np.pi * np.arange(points_per_dim) / points_per_dim
    grids = np.meshgrid(*([nodes] * n), indexing="ij")
    theta = np.stack([g.ravel() for g in grids], axis=-1)
    vals = _integrand(frequency_sums(theta, L), n, params.lam, D, "exact")
    return AdvantageEstimate(float(np.mean(vals)), 0.0, "quadrature", n, L, params.lam, D, theta.shape[0])


def gaussian_even_moment(k: int) -> float:
    """E[zeta^(2k)] for zeta ~ N(0, 1/2): (2k-1)!! / 2^k."""
    return math.prod(range(1, 2 * k, 2)) / 2.0**k


def gaussian_truncated_moment(lam: float, D: int) -> float:
    """E exp_{<=D}(lam^2 zeta^2) for zeta ~ N(0, 1/2), in closed form."""
    if D < 0:
        raise InvalidParameterError("D must be >= 0")
    # term_k = lam^2k (2k-1)!! / (2^k k!), built by its ratio to avoid huge integers
    lam2 = lam * lam
    terms = [1.0]
    for k in range(1, D + 1):
        terms.append(terms[-1] * lam2 * (2 * k - 1) / (2 * k))
    return math.fsum(terms)


def gaussian_surrogate(params: ModelParams, D: int, mode: str = "truncated") -> AdvantageEstimate:
    """Gaussian endpoint of the interpolation: g(lam, D)^(2L), or (1 - lam^2)^(-L) untruncated."""
    lam, L = params.lam, params.L
    if mode == "truncated":
        value = gaussian_truncated_moment(lam, D) ** (2 * L)
        method = "gaussian_surrogate_truncated"
    elif mode == "full":
        if lam >= 1:
            raise DomainError(f"untruncated surrogate needs lambda < 1, got {lam}")
        value = (1.0 - lam * lam) ** (-L)
        method = "gaussian_surrogate_full"
    else:
        raise InvalidParameterError(f"unknown mode {mode!r}")
    return AdvantageEstimate(value, 0.0, method, params.n, L, lam, D, 0)


@dataclass(frozen=True)
class Thresholds:
    L: int
    lower: float
    upper: float
    lower_cited: bool  # True when `lower` is a quoted constant, not the formula


CITED_LOWER_L2 = 0.937


def statistical_thresholds(L: int) -> Thresholds:
    """Information-theoretic detection thresholds in lambda for L frequencies.

    lower = sqrt(2(L-1)log(L-1) / (L(L-2))) (detection impossible below) for
    L >= 3, and the literature constant 0.937 at L = 2 where the formula is
    undefined; upper = sqrt(4 log L / (L-1)) (an inefficient test succeeds above).
    """
    if L < 2:
        raise DomainError(f"thresholds need L >= 2, got {L}")
    upper = math.sqrt(4 * math.log(L) / (L - 1))
    if L == 2:
        return Thresholds(L, CITED_LOWER_L2, upper, True)
    lower = math.sqrt(2 * (L - 1) * math.log(L - 1) / (L * (L - 2)))
    return Thresholds(L, lower, upper, False)
