"""Exact arithmetic shared by the rest of the package.

Rationals are :class:`fractions.Fraction`; residue classes, prime factorization
through a smallest-prime-factor sieve, the Kronecker symbol and multiplicative
arithmetic functions live here.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterator, List, Tuple

import numpy as np

SIEVE_LIMIT = 10**7

PositiveRational = Fraction


def positive_rational(num: int, den: int = 1) -> Fraction:
    """Return ``num/den`` in lowest terms, rejecting non-positive values."""
    if num <= 0 or den <= 0:
        raise ValueError(f"positive rational expected, got {num}/{den}")
    return Fraction(num, den)


def height(g: Fraction) -> int:
    return max(g.numerator, g.denominator)


@dataclass(frozen=True)
class ResidueClass:
    """The set of profinite integers congruent to ``residue`` mod ``modulus``."""

    modulus: int
    residue: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError(f"modulus must be positive, got {self.modulus}")
        if not 0 <= self.residue < self.modulus:
            raise ValueError(f"residue {self.residue} not in [0, {self.modulus})")

    @classmethod
    def of(cls, residue: int, modulus: int) -> "ResidueClass":
        return cls(modulus, residue % modulus)

    def is_invertible(self) -> bool:
        return math.gcd(self.residue, self.modulus) == 1

    def contains(self, n: int) -> bool:
        return (n - self.residue) % self.modulus == 0

    def refine(self, modulus: int) -> List["ResidueClass"]:
        """Split into classes modulo a multiple of the current modulus."""
        if modulus % self.modulus:
            raise ValueError(f"{modulus} is not a multiple of {self.modulus}")
        return [ResidueClass(modulus, self.residue + self.modulus * i)
                for i in range(modulus // self.modulus)]


# --- sieve -----------------------------------------------------------------

_spf_lock = threading.Lock()
_spf = np.zeros(2, dtype=np.int32)


def _smallest_prime_factors(limit: int) -> np.ndarray:
    """Smallest-prime-factor table covering ``0..limit`` (grown on demand)."""
    global _spf
    if limit > SIEVE_LIMIT:
        raise ValueError(f"{limit} exceeds the factorization sieve bound {SIEVE_LIMIT}")
    table = _spf
    if len(table) > limit:
        return table
    with _spf_lock:
        if len(_spf) > limit:
            return _spf
        size = min(SIEVE_LIMIT, max(limit, 2 * (len(_spf) - 1), 1 << 16)) + 1
        spf = np.zeros(size, dtype=np.int32)
        for p in range(2, math.isqrt(size - 1) + 1):
            if spf[p] == 0:
                block = spf[p * p::p]
                block[block == 0] = p
        rest = np.nonzero(spf == 0)[0]
        spf[rest] = rest
        _spf = spf
        return spf


def primes_up_to(n: int) -> List[int]:
    if n < 2:
        return []
    spf = _smallest_prime_factors(n)
    idx = np.arange(2, n + 1)
    return idx[spf[2:n + 1] == idx].tolist()


def factorize(n: int) -> List[Tuple[int, int]]:
    """Prime factorization of ``n`` as sorted ``(p, k)`` pairs."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    spf = _smallest_prime_factors(n)
    out: List[Tuple[int, int]] = []
    while n > 1:
        p = int(spf[n])
        k = 0
        while n % p == 0:
            n //= p
            k += 1
        out.append((p, k))
    return out


def divisors(n: int) -> List[int]:
    divs = [1]
    for p, k in factorize(n):
        divs = [d * p**e for d in divs for e in range(k + 1)]
    return sorted(divs)


def euler_phi(n: int) -> int:
    result = n
    for p, _ in factorize(n):
        result -= result // p
    return result


def lcm(*values: int) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


# --- Kronecker symbol ------------------------------------------------------

def fundamental_discriminant_error(d: int) -> str | None:
    """Why ``d`` is not a fundamental discriminant, or ``None`` if it is."""
    if d in (0, 1):
        return f"{d} is not a field discriminant"
    if d % 4 == 1:
        if not _squarefree(abs(d)):
            return f"d = {d} is 1 mod 4 but not squarefree"
        return None
    if d % 4 == 0:
        m = d // 4
        if m % 4 not in (2, 3):
            return f"d = {d} = 4m with m = {m} not congruent to 2 or 3 mod 4"
        if not _squarefree(abs(m)):
            return f"d = {d} = 4m with m = {m} not squarefree"
        return None
    return f"d = {d} is congruent to {d % 4} mod 4 (must be 0 or 1)"


def _squarefree(n: int) -> bool:
    return all(k == 1 for _, k in factorize(n))


def kronecker_symbol(d: int, n: int) -> int:
    """Kronecker symbol (d|n) for a fundamental discriminant ``d`` and ``n >= 1``."""
    err = fundamental_discriminant_error(d)
    if err is not None:
        raise ValueError(f"not a fundamental discriminant: {err}")
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return _kronecker(d, n)


def _kronecker(a: int, n: int) -> int:
    # standard binary algorithm; n > 0
    result = 1
    v = (n & -n).bit_length() - 1
    n >>= v
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


# --- multiplicative functions ---------------------------------------------

@dataclass
class MultiplicativeFunction:
    """Arithmetic function determined by its values on prime powers.

    ``rule(p, k)`` gives the value at ``p**k`` for ``k >= 1``. Values are
    memoized per argument; the memo is guarded by a lock so evaluation can be
    shared between threads.
    """

    rule: Callable[[int, int], int]
    name: str = "f"
    _memo: Dict[int, int] = field(default_factory=lambda: {1: 1}, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __call__(self, n: int) -> int:
        return evaluate_multiplicative(self, n)

    def table(self, limit: int) -> np.ndarray:
        """Values at ``0..limit`` as an int64 array (index 0 holds 0)."""
        return multiplicative_table(self, limit)


def evaluate_multiplicative(f: MultiplicativeFunction, n: int) -> int:
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    cached = f._memo.get(n)
    if cached is not None:
        return cached
    value = 1
    for p, k in factorize(n):
        value *= int(f.rule(p, k))
    with f._lock:
        f._memo[n] = value
    return value


def multiplicative_table(f: MultiplicativeFunction, limit: int) -> np.ndarray:
    """Sieve the values of ``f`` on ``1..limit``.

    Raises OverflowError if a value does not fit in int64.
    """
    spf = _smallest_prime_factors(max(limit, 2))
    out = np.zeros(limit + 1, dtype=np.int64)
    if limit < 1:
        return out
    out[1] = 1
    bound = np.iinfo(np.int64).max
    # for n = p^k * m with p = spf(n), p not dividing m
    prime_power_cache: Dict[Tuple[int, int], int] = {}
    for n in range(2, limit + 1):
        p = int(spf[n])
        m, k = n, 0
        while m % p == 0:
            m //= p
            k += 1
        key = (p, k)
        v = prime_power_cache.get(key)
        if v is None:
            v = int(f.rule(p, k))
            prime_power_cache[key] = v
        value = v * int(out[m])
        if abs(value) > bound:
            raise OverflowError(f"{f.name}({n}) = {value} does not fit in int64")
        out[n] = value
    return out


def sigma1_rule(p: int, k: int) -> int:
    return (p ** (k + 1) - 1) // (p - 1)


SIGMA1 = MultiplicativeFunction(sigma1_rule, name="sigma1")


def divisor_sigma1(n: int) -> int:
    """Sum of the positive divisors of ``n``."""
    return evaluate_multiplicative(SIGMA1, n)


def iter_coprime_rationals(bound: int) -> Iterator[Fraction]:
    """Positive rationals with numerator and denominator at most ``bound``."""
    for q in range(1, bound + 1):
        for p in range(1, bound + 1):
            if math.gcd(p, q) == 1:
                yield Fraction(p, q)
