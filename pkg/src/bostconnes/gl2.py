"""Hermite normal forms of determinant n and the GL2 partition function zeta(b) zeta(b-1)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Literal, Tuple

import numpy as np

from .arith import SIGMA1, divisors
from .numberfield import ZETA2, divisor_count_tail
from .spectral import SeriesValue, check_beta, check_cutoff, ordered_sum, power_terms

Config = Literal["hnf", "sigma"]


@dataclass(frozen=True, order=True)
class HermiteForm:
    """The matrix ``[[a, b], [0, d]]`` with ``a, d >= 1`` and ``0 <= b < d``."""

    a: int
    b: int
    d: int

    def __post_init__(self):
        if self.a < 1 or self.d < 1 or not 0 <= self.b < self.d:
            raise ValueError(f"({self.a}, {self.b}, {self.d}) is not in Hermite normal form")

    @property
    def matrix(self) -> Tuple[Tuple[int, int], Tuple[int, int]]:
        return ((self.a, self.b), (0, self.d))


def enumerate_hnf(n: int) -> List[HermiteForm]:
    """Representatives of GL2(Z) \\ {integer matrices of determinant n}."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return [HermiteForm(n // d, b, d) for d in divisors(n) for b in range(d)]


def det_phi(h: HermiteForm) -> int:
    return h.a * h.d


def hnf_reduce(m: Tuple[Tuple[int, int], Tuple[int, int]]) -> HermiteForm:
    """Left-multiply by GL2(Z) to reach Hermite normal form (positive determinant)."""
    (p, q), (r, s) = m
    if p * s - q * r <= 0:
        raise ValueError("determinant must be positive")
    # clear the lower-left entry: row operations from the extended gcd of (p, r)
    g, x, y = _ext_gcd(p, r)
    # [[x, y], [-r/g, p/g]] has determinant 1
    a, b = g, x * q + y * s
    c, d = 0, (-r // g) * q + (p // g) * s
    if a < 0:
        a, b = -a, -b
    if d < 0:
        d = -d
    b %= d
    return HermiteForm(a, b, d)


def _ext_gcd(a: int, b: int) -> Tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        k = a // b
        a, b = b, a - k * b
        x0, x1 = x1, x0 - k * x1
        y0, y1 = y1, y0 - k * y1
    return a, x0, y0


def hnf_counts(limit: int) -> np.ndarray:
    """Number of Hermite forms of each determinant ``0..limit``, by enumeration over ``d | n``."""
    counts = np.zeros(limit + 1, dtype=np.int64)
    for d in range(1, limit + 1):
        # each n = a d contributes d choices of b
        counts[d::d] += d
    return counts


def gl2_coefficients(limit: int, config: Config = "hnf") -> np.ndarray:
    if config == "hnf":
        return hnf_counts(limit)
    if config == "sigma":
        return SIGMA1.table(limit)
    raise ValueError(f"unknown coefficient configuration {config!r}")


def gl2_tail(beta: float, cutoff: int) -> float:
    """Bound on ``sum_{n > L} sigma1(n) n^-beta`` from ``sum_{n <= x} sigma1(n) <= zeta(2) x^2 / 2 + x (log x + 1) / 2``."""
    quad = beta * ZETA2 / 2 * cutoff ** (2.0 - beta) / (beta - 2.0)
    return quad + divisor_count_tail(beta, cutoff) / 2


def gl2_partition(beta: float, cutoff: int, config: Config = "hnf") -> SeriesValue:
    """``sum_{n <= L} sigma1(n) n^-beta``, coefficients from Hermite-form counts or from sigma1."""
    check_beta(beta, 2.0)
    check_cutoff(cutoff)
    c = gl2_coefficients(cutoff, config)[1:].astype(float)
    return SeriesValue(ordered_sum(c * power_terms(beta, cutoff)), gl2_tail(beta, cutoff),
                       cutoff, beta)
