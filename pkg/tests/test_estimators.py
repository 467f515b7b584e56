import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from synclab import rng as _rng
from synclab.errors import ConvergenceError, DegenerateEstimatorError, InvalidParameterError
from synclab.estimators import (
    brute_force_mle,
    dense_top_eigenpair,
    lanczos_top_eigenpair,
    overlap_score,
    pca_estimate,
    top_eigenpair,
)
from synclab.model import ModelParams, MultiFreqObservation, PhaseSignal, sample_null, sample_planted, spike


def charpoly_top(m: np.ndarray) -> float:
    """Largest root of the characteristic polynomial via Faddeev-LeVerrier."""
    n = m.shape[0]
    coeffs = [1.0 + 0j]
    mk = np.zeros_like(m)
    for k in range(1, n + 1):
        mk = m @ mk + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(m @ mk) / k)
    return float(np.max(np.roots(coeffs).real))


def random_hermitian(n: int, seed: int) -> np.ndarray:
    gen = _rng.substream(seed, 0xE1, n)
    a = _rng.complex_normal(gen, (n, n))
    return (a + a.conj().T) / 2


@pytest.mark.parametrize("seed", range(100))
def test_top_eigenpair_matches_charpoly(seed):
    n = 2 + seed % 3
    m = random_hermitian(n, seed)
    pair = top_eigenpair(m, tol=1e-14, max_iter=100_000)
    assert pair.value == pytest.approx(charpoly_top(m), abs=1e-8)
    assert np.linalg.norm(pair.vector) == pytest.approx(1, abs=1e-10)
    assert np.linalg.norm(m @ pair.vector - pair.value * pair.vector) <= 1e-6


def test_top_eigenpair_matches_dense_n6():
    for seed in range(100):
        m = random_hermitian(6, seed)
        pair = top_eigenpair(m, tol=1e-14, max_iter=100_000)
        assert pair.value == pytest.approx(np.linalg.eigvalsh(m)[-1], abs=1e-8)


def test_top_eigenpair_examples():
    pair = top_eigenpair(np.diag([3.0, 1.0]).astype(complex))
    assert pair.value == pytest.approx(3.0, abs=1e-9)
    assert abs(abs(pair.vector[0]) - 1) <= 1e-6

    x = np.exp(1j * np.array([0.3, 1.1, 2.0, 5.0])) / 2
    m = np.outer(x, x.conj())
    pair = top_eigenpair(m)
    assert pair.value == pytest.approx(1.0, abs=1e-9)
    assert abs(np.vdot(pair.vector, x)) == pytest.approx(1.0, abs=1e-9)


def test_top_eigenpair_signed_largest():
    # the largest-magnitude eigenvalue is negative; the signed largest is returned
    m = np.diag([-5.0, 1.0, 0.5]).astype(complex)
    assert top_eigenpair(m).value == pytest.approx(1.0, abs=1e-8)


def test_top_eigenpair_errors():
    with pytest.raises(InvalidParameterError):
        top_eigenpair(np.eye(2), tol=0)
    with pytest.raises(ConvergenceError) as info:
        top_eigenpair(random_hermitian(50, 1), tol=1e-15, max_iter=2)
    assert info.value.residual >= 0


@pytest.mark.slow
def test_top_eigenvalue_spiked_n800():
    _, obs = sample_planted(ModelParams(800, 1, 2.0, seed=2))
    pair = top_eigenpair(obs.channels[0])
    assert pair.value / math.sqrt(800) == pytest.approx(2.5, abs=0.1)
    assert pair.value == pytest.approx(dense_top_eigenpair(obs.channels[0]).value, rel=1e-8)


def test_solvers_agree():
    _, obs = sample_planted(ModelParams(60, 1, 2.0, seed=1))
    m = obs.channels[0]
    d, l, p = dense_top_eigenpair(m), lanczos_top_eigenpair(m), top_eigenpair(m)
    assert l.value == pytest.approx(d.value, rel=1e-10)
    assert p.value == pytest.approx(d.value, rel=1e-8)
    assert abs(np.vdot(d.vector, l.vector)) == pytest.approx(1, abs=1e-8)


def test_pca_noiseless():
    x = PhaseSignal(np.linspace(0, 6, 10))
    p = ModelParams(10, 2, 1.0)
    obs = MultiFreqObservation([spike(x, 1, 1.0), spike(x, 2, 1.0)], p, "planted")
    for solver in ("dense", "power"):
        X = pca_estimate(obs, 1, solver=solver)
        assert np.allclose(X, np.outer(x.x, x.x.conj()) / 10, atol=1e-10)
        assert np.linalg.norm(X) == pytest.approx(1, abs=1e-12)
    with pytest.raises(InvalidParameterError):
        pca_estimate(obs, 3)


def test_pca_null_overlap_small():
    x = PhaseSignal(np.zeros(400))
    vals = [overlap_score(pca_estimate(sample_null(ModelParams(400, 1, 0.0, seed=s))), x) for s in range(20)]
    assert np.mean(np.array(vals) < 0.1) >= 0.95


@pytest.mark.slow
def test_pca_overlap_above_threshold():
    vals = []
    for t in range(10):
        x, obs = sample_planted(ModelParams(1000, 1, 1.5, seed=4), t)
        vals.append(overlap_score(pca_estimate(obs, solver="dense"), x))
    assert abs(np.mean(vals) - (1 - 1 / 1.5**2)) <= 0.1


def test_overlap_examples():
    x = PhaseSignal([0.1, 2.0, 4.0, 5.5])
    xx = np.outer(x.x, x.x.conj())
    assert overlap_score(xx, x) == pytest.approx(1.0, abs=1e-12)
    assert overlap_score(np.eye(4, dtype=complex), x) == pytest.approx(1 / 2, abs=1e-12)
    with pytest.raises(DegenerateEstimatorError):
        overlap_score(np.zeros((4, 4)), x)


phase_lists = st.lists(st.floats(0, 2 * np.pi, exclude_max=True), min_size=2, max_size=8)


@given(phase_lists, st.floats(-10, 10), st.floats(1e-3, 1e3), st.integers(0, 1000))
def test_overlap_invariances(phases, shift, scale, seed):
    x = PhaseSignal(phases)
    n = x.n
    v = _rng.complex_normal(_rng.substream(seed, 0xF0), n)
    v /= np.linalg.norm(v)
    X = np.outer(v, v.conj())
    base = overlap_score(X, x)
    assert base == pytest.approx(abs(np.vdot(v, x.x)) ** 2 / n, abs=1e-12)
    assert overlap_score(X, PhaseSignal.from_angles(x.phases + shift)) == pytest.approx(base, abs=1e-12)
    assert overlap_score(scale * X, x) == pytest.approx(base, abs=1e-12)
    assert abs(base) <= 1 + 1e-12


@pytest.mark.slow
def test_overlap_monotone_in_snr():
    means, ses = [], []
    for lam in (0.5, 1.0, 1.5, 2.0):
        vals = []
        for t in range(20):
            x, obs = sample_planted(ModelParams(500, 1, lam, seed=6), t)
            vals.append(overlap_score(pca_estimate(obs), x))
        means.append(np.mean(vals))
        ses.append(np.std(vals, ddof=1) / math.sqrt(len(vals)))
    for i in range(3):
        pooled = math.hypot(ses[i], ses[i + 1])
        assert means[i + 1] >= means[i] - pooled


def test_mle_noiseless_on_grid():
    grid = 8
    x = PhaseSignal(2 * np.pi * np.array([0, 3, 5, 1, 7]) / grid)
    p = ModelParams(5, 2, 2.0)
    obs = MultiFreqObservation([spike(x, 1, 2.0), spike(x, 2, 2.0)], p, "planted")
    est = brute_force_mle(obs, grid)
    assert np.allclose(est.x, x.x, atol=1e-12)


def test_mle_budget():
    obs = sample_null(ModelParams(9, 1, 0.0))
    with pytest.raises(InvalidParameterError):
        brute_force_mle(obs, 8)
    with pytest.raises(InvalidParameterError):
        brute_force_mle(obs, 1)


@pytest.mark.slow
def test_mle_high_snr_recovery():
    good = 0
    for t in range(200):
        x, obs = sample_planted(ModelParams(6, 1, 3.0, seed=12), t)
        est = brute_force_mle(obs, 8)
        good += overlap_score(np.outer(est.x, est.x.conj()), x) >= 0.8
    assert good >= 180


def test_mle_null_overlap_not_concentrated_high():
    x = PhaseSignal(np.zeros(6))
    vals = []
    for t in range(30):
        est = brute_force_mle(sample_null(ModelParams(6, 1, 3.0, seed=13), trial=t), 4)
        vals.append(overlap_score(np.outer(est.x, est.x.conj()), x))
    # a uniformly random grid signal has mean overlap 1/n plus O(1/n) fluctuations
    assert np.mean(vals) <= 0.5
