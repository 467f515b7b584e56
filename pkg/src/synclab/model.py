"""Planted and null observation models for multi-frequency angular synchronization.

The planted law draws phases theta_1..theta_n uniformly, sets x_k = exp(i theta_k)
and observes, for every frequency l = 1..L,

    Y_l = (lambda / sqrt(n)) x^(l) (x^(l))^* + W_l,    W_l ~ GUE(n) independent,

where x^(l) is the entrywise l-th power.  The null law keeps only the noise.
The spike diagonal (lambda / sqrt(n)) is kept.

Matrices are dense complex128 numpy arrays holding both triangles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from synclab import rng as _rng
from synclab.errors import InvalidParameterError

HERMITIAN_ATOL = 1e-12

Provenance = Literal["planted", "null"]


@dataclass(frozen=True)
class PhaseSignal:
    phases: np.ndarray

    def __post_init__(self):
        phases = np.asarray(self.phases, dtype=float)
        if phases.ndim != 1 or phases.size < 1:
            raise InvalidParameterError("a phase signal needs at least one angle")
        if np.any(phases < 0) or np.any(phases >= 2 * np.pi):
            raise InvalidParameterError("phases must lie in [0, 2*pi)")
        object.__setattr__(self, "phases", phases)

    @property
    def n(self) -> int:
        return self.phases.size

    @property
    def x(self) -> np.ndarray:
        x = np.exp(1j * self.phases)
        assert np.max(np.abs(np.abs(x) - 1.0)) <= 1e-12
        return x

    @classmethod
    def from_angles(cls, angles) -> "PhaseSignal":
        """Build a signal from arbitrary real angles, reducing them mod 2*pi."""
        phases = np.mod(np.asarray(angles, dtype=float), 2 * np.pi)
        # mod can round up to exactly 2*pi for tiny negative inputs
        phases[phases >= 2 * np.pi] = 0.0
        return cls(phases)


@dataclass(frozen=True)
class ModelParams:
    n: int
    L: int
    lam: float
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameterError(f"n must be >= 1, got {self.n}")
        if self.L < 1:
            raise InvalidParameterError(f"L must be >= 1, got {self.L}")
        if not self.lam >= 0:
            raise InvalidParameterError(f"lambda must be >= 0, got {self.lam}")


@dataclass
class MultiFreqObservation:
    channels: list[np.ndarray]
    params: ModelParams
    provenance: Provenance

    def __post_init__(self):
        if len(self.channels) != self.params.L:
            raise InvalidParameterError(
                f"expected {self.params.L} channels, got {len(self.channels)}"
            )
        for ch in self.channels:
            check_hermitian(ch, self.params.n)


@dataclass
class JointObservation:
    observation: MultiFreqObservation
    external: list[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        obs = self.observation
        if len(self.external) != obs.params.L:
            raise InvalidParameterError("need one external matrix per channel")
        for z in self.external:
            check_hermitian(z, obs.params.n)


def check_hermitian(m: np.ndarray, n: int | None = None, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidParameterError(f"expected a square matrix, got shape {m.shape}")
    if n is not None and m.shape[0] != n:
        raise InvalidParameterError(f"expected dimension {n}, got {m.shape[0]}")
    if np.max(np.abs(m - m.conj().T), initial=0.0) > atol:
        raise InvalidParameterError("matrix is not Hermitian")
    if np.max(np.abs(np.imag(np.diag(m))), initial=0.0) > atol:
        raise InvalidParameterError("Hermitian diagonal must be real")
    return m


def sample_phases(n: int, rng: np.random.Generator) -> PhaseSignal:
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    return PhaseSignal(2 * np.pi * rng.random(n))


def lift_frequency(x: PhaseSignal, ell: int) -> np.ndarray:
    """Entrywise ell-th power of the signal, computed from the phases."""
    if ell < 1:
        raise InvalidParameterError(f"frequency must be >= 1, got {ell}")
    return np.exp(1j * ell * x.phases)


def sample_gue(n: int, rng: np.random.Generator) -> np.ndarray:
    """GUE(n): complex standard Gaussian off-diagonal, real N(0, 1) diagonal."""
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    iu = np.triu_indices(n, k=1)
    off = _rng.complex_normal(rng, len(iu[0]))
    diag = _rng.standard_normal(rng, n)
    w = np.zeros((n, n), dtype=complex)
    w[iu] = off
    w = w + w.conj().T
    w[np.diag_indices(n)] = diag
    return w


def spike(x: PhaseSignal, ell: int, lam: float) -> np.ndarray:
    v = lift_frequency(x, ell)
    return (lam / np.sqrt(x.n)) * np.outer(v, v.conj())


def _noise_channels(params: ModelParams, trial: int, arm: int) -> list[np.ndarray]:
    return [
        sample_gue(params.n, _rng.substream(params.seed, _rng.TAG_NOISE + ell, trial, arm))
        for ell in range(1, params.L + 1)
    ]


def signal_for(params: ModelParams, trial: int = 0, arm: int = 0) -> PhaseSignal:
    return sample_phases(params.n, _rng.substream(params.seed, _rng.TAG_SIGNAL, trial, arm))


def sample_planted(
    params: ModelParams, trial: int = 0, arm: int = 0
) -> tuple[PhaseSignal, MultiFreqObservation]:
    """Draw (x, (Y_1..Y_L)) from the planted law.

    The noise uses the same substreams as :func:`sample_null`, so lambda = 0
    reproduces the null draw exactly.
    """
    x = signal_for(params, trial, arm)
    noise = _noise_channels(params, trial, arm)
    channels = [w + spike(x, ell, params.lam) for ell, w in enumerate(noise, start=1)]
    for ch in channels:
        ch[np.diag_indices(params.n)] = ch.diagonal().real
    return x, MultiFreqObservation(channels, params, "planted")


def sample_null(params: ModelParams, trial: int = 0, arm: int = 0) -> MultiFreqObservation:
    return MultiFreqObservation(_noise_channels(params, trial, arm), params, "null")


def attach_external(
    obs: MultiFreqObservation, seed: int | None = None, trial: int = 0, arm: int = 0
) -> JointObservation:
    """Append L fresh GUE matrices Z_1..Z_L drawn from the external-channel streams.

    ``seed`` defaults to the observation's seed; passing an explicit seed
    decouples Z from the observation entirely.
    """
    seed = obs.params.seed if seed is None else seed
    n = obs.params.n
    external = [
        sample_gue(n, _rng.substream(seed, _rng.TAG_EXTERNAL + ell, trial, arm))
        for ell in range(1, obs.params.L + 1)
    ]
    return JointObservation(obs, external)
