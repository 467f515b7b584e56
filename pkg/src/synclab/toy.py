"""Exact low-degree computations on small testing problems.

A toy problem is a pair of laws (planted P, null Q) on R^N known only through
their monomial moments.  Two routes compute the squared degree-D advantage

    sup_{deg f <= D} E_P[f]^2 / E_Q[f^2]:

projecting the planted moment vector onto a Q-orthonormal polynomial basis,
and solving the normal equations G a = b with G the null Gram matrix.

The hidden-sample composition plants one P block among M otherwise null
blocks at a uniformly random position.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg

from synclab.errors import BudgetError, ConditioningError, InvalidParameterError

MAX_TOY_DEGREE = 4
MAX_COMPOSED_DEGREE = 3
MAX_COMPOSED_COORDS = 16
MAX_BASIS_SIZE = 4000
COND_LIMIT = 1e12

Exponents = tuple[int, ...]


def _std_normal_moment(k: int) -> float:
    return 0.0 if k % 2 else float(math.prod(range(1, k, 2)))


def _shifted_normal_moment(shift: np.ndarray, k: int) -> np.ndarray:
    """E (s + g)^k for g ~ N(0, 1), elementwise in s."""
    out = np.zeros_like(shift, dtype=float)
    for i in range(0, k + 1, 2):
        out = out + math.comb(k, i) * _std_normal_moment(i) * shift ** (k - i)
    return out


@dataclass
class ToyProblem:
    """A (P, Q) pair with cached monomial moments.

    Coordinates are independent N(0, 1) under Q.  Under P they are
    ``signal + N(0, 1)`` with the signal vector drawn from a finite weighted
    set of support points; the support is exact for the angular toy because
    the periodic trapezoid rule integrates its trigonometric moments exactly.
    """

    kind: str
    lam: float
    D: int
    support: np.ndarray  # (K, N) signal values
    weights: np.ndarray  # (K,)
    description: str = ""
    _null_cache: dict = field(default_factory=dict, repr=False)
    _planted_cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return self.support.shape[1]

    def null_moment(self, e: Exponents) -> float:
        if e not in self._null_cache:
            self._null_cache[e] = math.prod(_std_normal_moment(k) for k in e)
        return self._null_cache[e]

    def planted_moment(self, e: Exponents) -> float:
        if e not in self._planted_cache:
            per_point = np.ones(len(self.weights))
            for j, k in enumerate(e):
                if k:
                    per_point *= _shifted_normal_moment(self.support[:, j], k)
            self._planted_cache[e] = float(self.weights @ per_point)
        return self._planted_cache[e]


def build_toy_problem(kind: str, lam: float, D: int, extra_coords: int = 0) -> ToyProblem:
    """``angular_n2_L1``: the 2x2 single-frequency model in 4 standardized real coordinates
    (Y_11, Y_22, sqrt2 Re Y_12, sqrt2 Im Y_12).  ``gaussian_mean_shift``: N(lam, 1) vs N(0, 1).

    ``extra_coords`` appends coordinates that are N(0, 1) under both laws.
    """
    if D > MAX_TOY_DEGREE:
        raise BudgetError(f"toy degree must be <= {MAX_TOY_DEGREE}, got {D}")
    if D < 0 or lam < 0 or extra_coords < 0:
        raise InvalidParameterError("D, lambda and extra_coords must be nonnegative")
    if kind == "angular_n2_L1":
        # 2-phase trapezoid; exact for trigonometric degree < nodes
        q = 4 * MAX_TOY_DEGREE + 1
        t1, t2 = np.meshgrid(2 * np.pi * np.arange(q) / q, 2 * np.pi * np.arange(q) / q, indexing="ij")
        phi = (t1 - t2).ravel()
        diag = np.full_like(phi, lam / math.sqrt(2))
        support = np.stack([diag, diag, lam * np.cos(phi), lam * np.sin(phi)], axis=1)
        desc = "angular synchronization, n=2, L=1, spike diagonal kept"
    elif kind == "gaussian_mean_shift":
        support = np.array([[lam]])
        desc = f"N({lam}, 1) vs N(0, 1)"
    else:
        raise InvalidParameterError(f"unknown toy kind {kind!r}")
    if extra_coords:
        support = np.hstack([support, np.zeros((len(support), extra_coords))])
        desc += f" + {extra_coords} uninformative coordinates"
    weights = np.full(len(support), 1.0 / len(support))
    return ToyProblem(kind, lam, D, support, weights, desc)


def monomials(dim: int, D: int) -> list[Exponents]:
    """Exponent tuples of total degree <= D, by degree then lexicographically (x1 first)."""
    out: list[Exponents] = []
    for deg in range(D + 1):
        out.extend(_compositions(deg, dim))
    return out


def _compositions(total: int, parts: int) -> list[Exponents]:
    # descending lexicographic order
    if parts == 1:
        return [(total,)]
    return [(k,) + rest for k in range(total, -1, -1) for rest in _compositions(total - k, parts - 1)]


def _add(a: Exponents, b: Exponents) -> Exponents:
    return tuple(x + y for x, y in zip(a, b))


def gram_matrix(monos: list[Exponents], moment: Callable[[Exponents], float]) -> np.ndarray:
    k = len(monos)
    g = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            g[i, j] = g[j, i] = moment(_add(monos[i], monos[j]))
    return g


def _check_conditioning(g: np.ndarray, monos: list[Exponents]) -> None:
    degrees = np.array([sum(e) for e in monos])
    for d in range(degrees.max() + 1):
        sub = g[np.ix_(degrees <= d, degrees <= d)]
        cond = np.linalg.cond(sub)
        if not cond <= COND_LIMIT:
            raise ConditioningError(f"null Gram matrix condition {cond:.3g} exceeds {COND_LIMIT:.0e} at degree {d}", d)


@dataclass(frozen=True)
class GramBasis:
    """Q-orthonormal polynomials f_a = sum_j coef[a, j] * monomial_j."""

    monomials: list[Exponents]
    coef: np.ndarray  # lower triangular, row a is f_a
    gram: np.ndarray
    condition: float

    def orthonormality_residual(self) -> float:
        c = self.coef
        return float(np.max(np.abs(c @ self.gram @ c.T - np.eye(len(c)))))


def _basis_from(monos: list[Exponents], g: np.ndarray) -> GramBasis:
    """Gram-Schmidt in coefficient space, monomial by monomial in the fixed order.

    Each new vector is projected against all previous ones in one block step,
    repeated twice; this matches modified Gram-Schmidt in accuracy while
    staying in BLAS.
    """
    _check_conditioning(g, monos)
    k = len(monos)
    coef = np.zeros((k, k))
    for i in range(k):
        v = np.zeros(k)
        v[i] = 1.0
        prev = coef[:i]
        for _ in range(2):
            v -= prev.T @ (prev @ (g @ v))
        coef[i] = v / math.sqrt(v @ g @ v)
    return GramBasis(monos, coef, g, float(np.linalg.cond(g)))


def gram_basis(p: ToyProblem, D: int | None = None) -> GramBasis:
    D = p.D if D is None else D
    if D > MAX_TOY_DEGREE:
        raise BudgetError(f"toy degree must be <= {MAX_TOY_DEGREE}, got {D}")
    monos = monomials(p.dim, D)
    return _basis_from(monos, gram_matrix(monos, p.null_moment))


def planted_vector(p: ToyProblem, monos: list[Exponents]) -> np.ndarray:
    return np.array([p.planted_moment(e) for e in monos])


def advantage_via_basis(p: ToyProblem, basis: GramBasis) -> float:
    """Squared advantage: sum over basis functions of E_P[f_a]^2."""
    means = basis.coef @ planted_vector(p, basis.monomials)
    return float(means @ means)


def advantage_via_linear_solve(p: ToyProblem, D: int | None = None) -> float:
    """b . G^{-1} b, the maximum of E_P[f]^2 / E_Q[f^2] over coefficient vectors."""
    D = p.D if D is None else D
    monos = monomials(p.dim, D)
    g = gram_matrix(monos, p.null_moment)
    _check_conditioning(g, monos)
    b = planted_vector(p, monos)
    a = scipy.linalg.cho_solve(scipy.linalg.cho_factor(g), b)
    return float(b @ a)


@dataclass(frozen=True)
class HiddenSampleResult:
    composed: float
    single: float
    M: int
    D: int
    budget: str
    cross_block_max: float  # largest |E_P[f]| over basis functions led by a multi-block monomial

    @property
    def predicted(self) -> float:
        return 1.0 + (self.single - 1.0) / self.M

    @property
    def bound(self) -> float:
        return 1.0 + self.single / self.M


def _composed_monomials(N: int, M: int, D: int, budget: str) -> list[Exponents]:
    if budget == "total":
        return monomials(N * M, D)
    if budget == "per_block":
        block = monomials(N, D)
        combos = [sum(parts, ()) for parts in itertools.product(block, repeat=M)]
        return sorted(combos, key=lambda e: (sum(e), tuple(-x for x in e)))
    raise InvalidParameterError(f"unknown degree budget {budget!r}")


def hidden_sample_advantage(p: ToyProblem, M: int, D: int, budget: str = "total") -> HiddenSampleResult:
    """Degree-D advantage of the hidden informative sample problem over M blocks.

    ``budget="total"`` bounds the total degree across blocks by D;
    ``budget="per_block"`` bounds each block's degree by D.  Both budgets
    contain every single-block polynomial of degree <= D, and every basis
    function touching two or more blocks has planted mean zero, so either way
    the result is 1 + (single - 1) / M.
    """
    N = p.dim
    if M < 2:
        raise InvalidParameterError("M must be >= 2")
    if D > MAX_COMPOSED_DEGREE or M * N > MAX_COMPOSED_COORDS:
        raise BudgetError(
            f"composed problem needs D <= {MAX_COMPOSED_DEGREE} and M*N <= {MAX_COMPOSED_COORDS}"
        )
    monos = _composed_monomials(N, M, D, budget)
    if len(monos) > MAX_BASIS_SIZE:
        raise BudgetError(f"composed basis has {len(monos)} monomials, limit {MAX_BASIS_SIZE}")

    def blocks(e: Exponents) -> list[Exponents]:
        return [e[i * N : (i + 1) * N] for i in range(M)]

    def null(e: Exponents) -> float:
        return math.prod(p.null_moment(b) for b in blocks(e))

    def planted(e: Exponents) -> float:
        bl = blocks(e)
        nulls = [p.null_moment(b) for b in bl]
        total = 0.0
        for i in range(M):
            rest = math.prod(nulls[:i] + nulls[i + 1 :])
            if rest:
                total += p.planted_moment(bl[i]) * rest
        return total / M

    basis = _basis_from(monos, gram_matrix(monos, null))
    means = basis.coef @ np.array([planted(e) for e in monos])
    multi = np.array([sum(any(b) for b in blocks(e)) >= 2 for e in monos])
    cross = float(np.max(np.abs(means[multi]), initial=0.0))
    single = advantage_via_basis(p, gram_basis(p, D))
    return HiddenSampleResult(float(means @ means), single, M, D, budget, cross)
