"""Spectral estimators, the normalized overlap score and a toy-scale exhaustive MLE."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from synclab import rng as _rng
from synclab.errors import (
    ConvergenceError,
    DegenerateEstimatorError,
    InvalidParameterError,
)
from synclab.model import MultiFreqObservation, PhaseSignal, check_hermitian


@dataclass(frozen=True)
class EigenPair:
    value: float
    vector: np.ndarray
    iterations: int = 0
    residual: float = 0.0


def top_eigenpair(
    m: np.ndarray,
    tol: float = 1e-10,
    max_iter: int = 10_000,
    seed: int = 0,
) -> EigenPair:
    """Largest (signed) eigenpair of a Hermitian matrix by shifted power iteration.

    The shift is the max row-sum norm, which makes M + shift*I positive
    semidefinite so the algebraically largest eigenvalue dominates.  Iteration
    stops when successive Rayleigh quotients differ by at most
    ``tol * max(1, |rho|)`` and the residual ``|Mv - rho v|`` is below the same
    bound (or the rounding floor of the matrix-vector product).  If the budget runs out, the iteration restarts once
    from a fresh random vector before giving up.
    """
    m = check_hermitian(m)
    if tol <= 0:
        raise InvalidParameterError("tol must be positive")
    n = m.shape[0]
    shift = float(np.max(np.sum(np.abs(m), axis=1)))
    shifted = m + shift * np.eye(n)
    floor = 64 * np.finfo(float).eps * max(shift, 1.0) * math.sqrt(n)

    residual = math.inf
    for attempt in range(2):
        gen = _rng.substream(seed, _rng.TAG_START_VECTOR, attempt)
        v = _rng.complex_normal(gen, n)
        v /= np.linalg.norm(v)
        rho = float(np.real(np.vdot(v, m @ v)))
        for it in range(1, max_iter + 1):
            w = shifted @ v
            norm = np.linalg.norm(w)
            if norm == 0.0:
                # M = -shift * I on the span of v; any vector is an eigenvector
                break
            v = w / norm
            mv = m @ v
            new_rho = float(np.real(np.vdot(v, mv)))
            scale = tol * max(1.0, abs(new_rho))
            settled = abs(new_rho - rho) <= scale
            rho = new_rho
            if settled:
                # the Rayleigh quotient settles quadratically faster than the
                # vector, so also require a small residual
                residual = float(np.linalg.norm(mv - rho * v))
                if residual <= max(scale, floor):
                    return EigenPair(rho, _fix_phase(v), it, residual)
        residual = float(np.linalg.norm(m @ v - rho * v))
    raise ConvergenceError(f"power iteration did not converge in 2 x {max_iter} steps", residual)


def _fix_phase(v: np.ndarray) -> np.ndarray:
    # rotate so the largest-modulus entry is real positive; eigenvectors are
    # only defined up to a unit phase
    k = int(np.argmax(np.abs(v)))
    return v * (np.abs(v[k]) / v[k])


def dense_top_eigenpair(m: np.ndarray) -> EigenPair:
    """LAPACK reference for the top eigenpair (used at large n)."""
    n = m.shape[0]
    vals, vecs = scipy.linalg.eigh(m, subset_by_index=[n - 1, n - 1])
    v = vecs[:, 0]
    return EigenPair(float(vals[0]), _fix_phase(v), 0, float(np.linalg.norm(m @ v - vals[0] * v)))


def pca_estimate(
    obs: MultiFreqObservation, channel: int = 1, solver: str = "dense", tol: float = 1e-10
) -> np.ndarray:
    """Rank-one estimator v v^* from the top eigenvector of one channel (1-based)."""
    if not 1 <= channel <= obs.params.L:
        raise InvalidParameterError(f"channel must be in [1, {obs.params.L}], got {channel}")
    return rank_one_from_top(obs.channels[channel - 1], solver=solver, tol=tol)


def lanczos_top_eigenpair(m: np.ndarray, tol: float = 1e-10, seed: int = 0) -> EigenPair:
    """Implicitly restarted Lanczos (ARPACK) for the algebraically largest eigenpair."""
    n = m.shape[0]
    if n < 3:
        return dense_top_eigenpair(m)
    v0 = _rng.complex_normal(_rng.substream(seed, _rng.TAG_START_VECTOR, 0), n)
    vals, vecs = scipy.sparse.linalg.eigsh(m, k=1, which="LA", v0=v0, tol=tol)
    v = vecs[:, 0] / np.linalg.norm(vecs[:, 0])
    return EigenPair(float(vals[0]), _fix_phase(v), 0, float(np.linalg.norm(m @ v - vals[0] * v)))


def rank_one_from_top(m: np.ndarray, solver: str = "dense", tol: float = 1e-10) -> np.ndarray:
    if solver == "dense":
        pair = dense_top_eigenpair(m)
    elif solver == "lanczos":
        pair = lanczos_top_eigenpair(m, tol=tol)
    elif solver == "power":
        pair = top_eigenpair(m, tol=tol)
    else:
        raise InvalidParameterError(f"unknown solver {solver!r}")
    v = pair.vector
    return np.outer(v, v.conj())


def overlap_score(X: np.ndarray, x: PhaseSignal) -> float:
    """<X, x x^*> / (||X||_F ||x x^*||_F); ||x x^*||_F = n for unit-modulus x."""
    fro = np.linalg.norm(X)
    if fro == 0.0:
        raise DegenerateEstimatorError("estimator has zero Frobenius norm")
    xv = x.x
    # <X, x x^*> = sum_jk X_jk conj(x_j) x_k = x^* X x
    inner = np.real(np.vdot(xv, X @ xv))
    return float(inner / (fro * x.n))


def brute_force_mle(obs: MultiFreqObservation, grid: int, chunk: int = 1 << 16) -> PhaseSignal:
    """Exhaustive maximizer of sum_l Re<Y_l, (lam/sqrt n) x^(l) x^(l)*> over a phase grid.

    theta_1 is pinned to 0 (global phase gauge).  Ties resolve to the first
    candidate in lexicographic grid order.
    """
    n, L = obs.params.n, obs.params.L
    if grid < 2:
        raise InvalidParameterError("grid must be >= 2")
    if n * math.log2(grid) > 24:
        raise InvalidParameterError(
            f"enumeration budget exceeded: n*log2(grid) = {n * math.log2(grid):.1f} > 24"
        )
    scale = obs.params.lam / math.sqrt(n)
    roots = np.exp(2j * np.pi * np.arange(grid) / grid)
    best_val, best_idx = -math.inf, None
    free = itertools.product(range(grid), repeat=n - 1)
    while True:
        block = np.array(list(itertools.islice(free, chunk)), dtype=np.int64)
        if block.size == 0:
            break
        block = block.reshape(-1, n - 1)
        idx = np.concatenate([np.zeros((len(block), 1), dtype=np.int64), block], axis=1)
        val = np.zeros(len(idx))
        for ell, y in enumerate(obs.channels, start=1):
            v = roots[(ell * idx) % grid]
            # x^* Y x for every candidate row
            val += np.real(np.einsum("cj,jk,ck->c", v.conj(), y, v))
        val *= scale
        k = int(np.argmax(val))
        if val[k] > best_val:
            best_val, best_idx = val[k], idx[k]
    return PhaseSignal(2 * np.pi * best_idx / grid)
