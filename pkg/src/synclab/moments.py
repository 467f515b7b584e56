"""Exact mixed moments of trigonometric and Gaussian coordinates.

For a single uniform phase theta,

    E prod_l sin(l theta)^a_l cos(l theta)^b_l

is the constant Fourier coefficient of a Laurent polynomial in z = e^{i theta}.
With sin = (z^l - z^-l) / 2i and cos = (z^l + z^-l) / 2 the product has integer
coefficients up to a factor (-i)^{sum a} / 2^{sum a + sum b}, so the moment is
an exact rational.  The Gaussian comparison moments use zeta ~ N(0, 1/2).
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Sequence

from synclab.errors import BudgetError

MAX_TOTAL_DEGREE = 24
MAX_FREQUENCIES = 8


def _check(alphas: Sequence[int], betas: Sequence[int]) -> tuple[list[int], list[int]]:
    a, b = [int(v) for v in alphas], [int(v) for v in betas]
    if len(a) != len(b):
        raise BudgetError("alphas and betas need one entry per frequency")
    if any(v < 0 for v in a + b):
        raise BudgetError("exponents must be natural numbers")
    if len(a) > MAX_FREQUENCIES:
        raise BudgetError(f"at most {MAX_FREQUENCIES} frequencies, got {len(a)}")
    if sum(a) + sum(b) > MAX_TOTAL_DEGREE:
        raise BudgetError(f"total degree {sum(a) + sum(b)} exceeds {MAX_TOTAL_DEGREE}")
    return a, b


def _mul(p: dict[int, int], q: dict[int, int]) -> dict[int, int]:
    out: dict[int, int] = defaultdict(int)
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            out[e1 + e2] += c1 * c2
    return {e: c for e, c in out.items() if c}


def _power(p: dict[int, int], k: int) -> dict[int, int]:
    out = {0: 1}
    for _ in range(k):
        out = _mul(out, p)
    return out


def trig_moment_exact(alphas: Sequence[int], betas: Sequence[int]) -> Fraction:
    """E_theta prod_l sin(l theta)^alphas[l-1] cos(l theta)^betas[l-1], exactly."""
    a, b = _check(alphas, betas)
    poly = {0: 1}
    for ell, (al, be) in enumerate(zip(a, b), start=1):
        poly = _mul(poly, _power({ell: 1, -ell: -1}, al))
        poly = _mul(poly, _power({ell: 1, -ell: 1}, be))
    const = poly.get(0, 0)
    sa, sb = sum(a), sum(b)
    if const == 0:
        return Fraction(0)
    # (-i)^sa is real here: an odd total sine degree forces const = 0 by theta -> -theta
    sign = (-1) ** (sa // 2)
    return Fraction(sign * const, 2 ** (sa + sb))


def _half_gaussian_moment(k: int) -> Fraction:
    """E zeta^k for zeta ~ N(0, 1/2): (k-1)!! / 2^(k/2) for even k, 0 for odd k."""
    if k % 2:
        return Fraction(0)
    num = 1
    for j in range(1, k, 2):
        num *= j
    return Fraction(num, 2 ** (k // 2))


def gaussian_moment_exact(alphas: Sequence[int], betas: Sequence[int]) -> Fraction:
    a, b = _check(alphas, betas)
    out = Fraction(1)
    for k in a + b:
        out *= _half_gaussian_moment(k)
    return out


def moment_gap(alphas: Sequence[int], betas: Sequence[int]) -> Fraction:
    return trig_moment_exact(alphas, betas) - gaussian_moment_exact(alphas, betas)
