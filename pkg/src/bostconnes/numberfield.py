"""Quadratic fields: ideal counting, Dedekind zeta, class groups, Hilbert-modular series."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, List, Mapping, Tuple, Union

import numpy as np

from .arith import (MultiplicativeFunction, evaluate_multiplicative, fundamental_discriminant_error,
                    kronecker_symbol, primes_up_to)
from .spectral import SeriesValue, check_beta, check_cutoff, ordered_sum, power_terms

ZETA2 = math.pi**2 / 6

# squarefree m < 100 with Q(sqrt m) of class number one
_CLASS_NUMBER_ONE_REAL = (2, 3, 5, 6, 7, 11, 13, 14, 17, 19, 21, 22, 23, 29, 31, 33, 37, 38, 41,
                          43, 46, 47, 53, 57, 59, 61, 62, 67, 69, 71, 73, 77, 83, 86, 89, 93, 94, 97)
CLASS_NUMBER_ONE_REAL_DISCRIMINANTS = tuple(sorted(m if m % 4 == 1 else 4 * m
                                                   for m in _CLASS_NUMBER_ONE_REAL))


def _ideal_count_rule(d: int) -> Callable[[int, int], int]:
    def rule(p: int, k: int) -> int:
        s = kronecker_symbol(d, p)
        if s == 1:
            return k + 1
        if s == -1:
            return 1 if k % 2 == 0 else 0
        return 1
    return rule


@dataclass(frozen=True)
class QuadraticField:
    """Q(sqrt d) for a fundamental discriminant d."""

    discriminant: int
    ideal_counts: MultiplicativeFunction = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        err = fundamental_discriminant_error(self.discriminant)
        if err is not None:
            raise ValueError(f"not a fundamental discriminant: {err}")
        object.__setattr__(self, "ideal_counts", MultiplicativeFunction(
            _ideal_count_rule(self.discriminant), name=f"a[{self.discriminant}]"))

    @property
    def is_real(self) -> bool:
        return self.discriminant > 0

    def kronecker(self, n: int) -> int:
        return kronecker_symbol(self.discriminant, n)

    def splitting(self, p: int) -> str:
        return {1: "split", -1: "inert", 0: "ramified"}[self.kronecker(p)]

    def coefficient_table(self, limit: int) -> np.ndarray:
        """``a_n`` for ``n = 0..limit`` (``a_0 = 0``)."""
        return self.ideal_counts.table(limit)

    def local_factor(self, p: int, beta: float) -> float:
        """Euler factor at p of the Dedekind zeta."""
        x = p ** (-beta)
        s = self.kronecker(p)
        if s == 1:
            return 1.0 / (1.0 - x) ** 2
        if s == -1:
            return 1.0 / (1.0 - x * x)
        return 1.0 / (1.0 - x)


def ideal_count(F: QuadraticField, n: int) -> int:
    """Number of integral ideals of norm n."""
    return evaluate_multiplicative(F.ideal_counts, n)


def divisor_count_tail(beta: float, cutoff: int) -> float:
    """Bound on ``sum_{n > L} d(n) n^-beta`` from ``sum_{n <= x} d(n) <= x (log x + 1)``."""
    b = beta - 1.0
    return beta * cutoff ** (-b) * ((math.log(cutoff) + 1.0) / b + 1.0 / b**2)


def dedekind_zeta(F: QuadraticField, beta: float, cutoff: int) -> SeriesValue:
    """Partial sum of ``a_n n^-beta``; the tail uses ``a_n <= d(n)``."""
    check_beta(beta)
    check_cutoff(cutoff)
    a = F.coefficient_table(cutoff)[1:].astype(float)
    return SeriesValue(ordered_sum(a * power_terms(beta, cutoff)),
                       divisor_count_tail(beta, cutoff), cutoff, beta)


@dataclass(frozen=True)
class NormResidueObservable:
    """Diagonal observable ``f(n) = values[n mod modulus]`` (missing residues give 0)."""

    modulus: int
    values: Mapping[int, complex]

    def __call__(self, n: np.ndarray) -> np.ndarray:
        lookup = np.zeros(self.modulus, dtype=complex)
        for r, v in self.values.items():
            lookup[r % self.modulus] = v
        return lookup[np.asarray(n) % self.modulus]


Observable = Union[NormResidueObservable, Callable[[np.ndarray], np.ndarray]]


def field_gibbs_evaluate(F: QuadraticField, beta: float, cutoff: int, f: Observable) -> complex:
    """``sum a_n f(n) n^-beta / sum a_n n^-beta`` over ``n <= cutoff``."""
    check_beta(beta)
    check_cutoff(cutoff)
    a = F.coefficient_table(cutoff)[1:].astype(float)
    w = a * power_terms(beta, cutoff)
    n = np.arange(1, cutoff + 1, dtype=np.int64)
    vals = np.asarray(f(n), dtype=complex)
    return complex(ordered_sum(vals * w)) / ordered_sum(w)


def euler_product(F: QuadraticField, beta: float, prime_bound: int) -> float:
    out = 1.0
    for p in primes_up_to(prime_bound):
        out *= F.local_factor(p, beta)
    return out


# --- binary quadratic forms -------------------------------------------------

Form = Tuple[int, int, int]


def is_reduced(form: Form) -> bool:
    a, b, c = form
    if not (abs(b) <= a <= c):
        return False
    if (abs(b) == a or a == c) and b < 0:
        return False
    return True


def reduce_form(form: Form) -> Form:
    """Reduce a positive definite form to the unique reduced form in its class."""
    a, b, c = form
    if a <= 0 or b * b - 4 * a * c >= 0:
        raise ValueError(f"{form} is not positive definite")
    while True:
        if not -a < b <= a:
            # translate b into (-a, a]
            k = (a - b) // (2 * a)
            c = a * k * k + b * k + c
            b = b + 2 * a * k
            continue
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return (a, b, c)


@dataclass(frozen=True)
class ClassGroupData:
    discriminant: int
    forms: Tuple[Form, ...]

    @property
    def class_number(self) -> int:
        return len(self.forms)

    def to_json(self) -> dict:
        return {"d": self.discriminant, "h": self.class_number,
                "forms": [list(f) for f in self.forms]}


def class_group(d: int) -> ClassGroupData:
    """Reduced primitive forms ``(a, b, c)`` of discriminant ``d < 0``."""
    err = fundamental_discriminant_error(d)
    if err is not None:
        raise ValueError(f"not a fundamental discriminant: {err}")
    if d > 0:
        raise ValueError("class groups are computed for imaginary quadratic fields only (d < 0)")
    forms = []
    a = 1
    while 3 * a * a <= -d:
        for b in range(-a + 1, a + 1):
            if (b - d) % 2:
                continue
            num = b * b - d
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (a == c and b < 0):
                continue
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            forms.append((a, b, c))
        a += 1
    forms.sort(key=lambda f: (f[0], abs(f[1]), -f[1]))
    return ClassGroupData(d, tuple(forms))


# --- Hilbert-modular series -------------------------------------------------

def check_class_number_one(F: QuadraticField) -> None:
    if not F.is_real:
        raise ValueError(f"d = {F.discriminant}: the Hilbert-modular series needs a real quadratic field")
    if F.discriminant not in CLASS_NUMBER_ONE_REAL_DISCRIMINANTS:
        raise ValueError(
            f"d = {F.discriminant}: class number one is required for the principal/full comparison "
            f"and is certified only for discriminants of Q(sqrt m), m < 100 squarefree")


def hilbert_coefficients(F: QuadraticField, limit: int) -> np.ndarray:
    """``c_n = sum_{k | n} a_{n/k} a_k k`` (so ``sum c_n n^-s = zeta_F(s) zeta_F(s-1)``)."""
    a = F.coefficient_table(limit)
    c = np.zeros(limit + 1, dtype=np.int64)
    for k in range(1, limit + 1):
        if a[k]:
            c[k::k] += a[1:limit // k + 1] * (a[k] * k)
    return c


def hilbert_tail(beta: float, cutoff: int) -> float:
    """Bound on ``sum_{n > L} c_n n^-beta`` using ``sum_{n <= x} c_n / n <= zeta(2)^2 x (log x + 1)``."""
    b = beta - 2.0
    return (beta - 1.0) * ZETA2**2 * cutoff ** (-b) * ((math.log(cutoff) + 1.0) / b + 1.0 / b**2)


def hilbert_partition(F: QuadraticField, beta: float, cutoff: int) -> SeriesValue:
    """Partition function of the Hilbert-modular system, truncated at norm ``cutoff``."""
    check_class_number_one(F)
    check_beta(beta, 2.0)
    check_cutoff(cutoff)
    c = hilbert_coefficients(F, cutoff)[1:].astype(float)
    return SeriesValue(ordered_sum(c * power_terms(beta, cutoff)), hilbert_tail(beta, cutoff),
                       cutoff, beta)


def omega_matrix(d: int) -> np.ndarray:
    """Multiplication by ``omega = (d + sqrt d)/2`` on O_F = Z + Z omega, acting on row vectors."""
    # omega * (x + y omega) = -y (d^2 - d)/4 + (x + d y) omega
    return np.array([[0, 1], [-(d * d - d) // 4, d]], dtype=np.int64)


def _in_lattice(basis: List[List[int]], v: List[int]) -> bool:
    # basis rows in upper-triangular Hermite form with positive pivots
    v = list(v)
    for i, row in enumerate(basis):
        if v[i] % row[i]:
            return False
        k = v[i] // row[i]
        if k:
            v = [x - k * y for x, y in zip(v, row)]
    return not any(v)


def _omega_closed(basis: List[List[int]], w: np.ndarray) -> bool:
    for row in basis:
        v = []
        for j in range(0, len(row), 2):
            x, y = row[j], row[j + 1]
            v += [x * int(w[0, 0]) + y * int(w[1, 0]), x * int(w[0, 1]) + y * int(w[1, 1])]
        if not _in_lattice(basis, v):
            return False
    return True


def count_submodules(d: int, n: int) -> int:
    """Brute force: O_F-submodules of O_F^2 of index n, as Hermite forms in Z^4 closed under omega.

    Every such module contains n O_F^2, so this counts submodules of (O_F/n)^2.
    The last two coordinates (the second copy of O_F) are omega-stable, so the
    lower block is itself an ideal and is enumerated first.
    """
    w = omega_matrix(d)
    total = 0
    for d3 in range(1, n + 1):
        if n % d3:
            continue
        for d4 in range(1, n // d3 + 1):
            if (n // d3) % d4:
                continue
            for h34 in range(d4):
                low = [[0, 0, d3, h34], [0, 0, 0, d4]]
                if not _omega_closed([r[2:] for r in low], w):
                    continue
                rest = n // (d3 * d4)
                for d1 in range(1, rest + 1):
                    if rest % d1:
                        continue
                    d2 = rest // d1
                    total += _count_top(d1, d2, low, w)
    return total


def _count_top(d1: int, d2: int, low: List[List[int]], w: np.ndarray) -> int:
    d3, d4 = low[0][2], low[1][3]
    count = 0
    for h12 in range(d2):
        for h13 in range(d3):
            for h14 in range(d4):
                for h23 in range(d3):
                    for h24 in range(d4):
                        basis = [[d1, h12, h13, h14], [0, d2, h23, h24]] + low
                        if _omega_closed(basis, w):
                            count += 1
    return count
