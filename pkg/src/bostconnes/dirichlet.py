"""Dirichlet characters with exact root-of-unity values, conductors and L-series."""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, List, Mapping, Tuple

import numpy as np

from .arith import euler_phi, factorize, divisors, kronecker_symbol, lcm
from .spectral import SeriesValue, check_cutoff, ordered_sum, power_terms, zeta_tail


def root_of_unity(k: int, order: int) -> complex:
    """``exp(2 pi i k / order)``, exact at the fourth roots of unity."""
    k %= order
    if 4 * k % order == 0:
        return (1, 1j, -1, -1j)[4 * k // order]
    return cmath.exp(2j * math.pi * k / order)


@dataclass(frozen=True)
class DirichletCharacter:
    """A character of (Z/m)^x; ``indices[u] = k`` means ``chi(u) = exp(2 pi i k / order)``."""

    modulus: int
    order: int
    indices: Tuple[Tuple[int, int], ...]

    @property
    def table(self) -> Dict[int, int]:
        return dict(self.indices)

    def __call__(self, n: int) -> complex:
        k = self.table.get(n % self.modulus)
        return 0j if k is None else complex(root_of_unity(k, self.order))

    def value_array(self) -> np.ndarray:
        """``chi(r)`` for ``r = 0..modulus-1``."""
        out = np.zeros(self.modulus, dtype=complex)
        for u, k in self.indices:
            out[u] = root_of_unity(k, self.order)
        return out

    @property
    def is_principal(self) -> bool:
        return self.order == 1

    @property
    def conductor(self) -> int:
        return conductor(self)

    def to_json(self) -> dict:
        return {"modulus": self.modulus, "conductor": self.conductor, "order": self.order,
                "values": [[u, k] for u, k in self.indices]}


def _make(modulus: int, raw: Mapping[int, int], big_order: int) -> DirichletCharacter:
    # reduce the indices to the character's own order
    g = big_order
    for k in raw.values():
        g = math.gcd(g, k)
    order = big_order // g if g else 1
    step = big_order // order
    return DirichletCharacter(modulus, order, tuple(sorted((u, (k // step) % order)
                                                           for u, k in raw.items())))


def _primitive_root(p: int) -> int:
    phi = p - 1
    qs = [q for q, _ in factorize(phi)] if phi > 1 else []
    for g in range(2, p + 1):
        if all(pow(g, phi // q, p) != 1 for q in qs):
            return g
    return 1


def _components(m: int) -> List[Tuple[int, List[Tuple[int, int]]]]:
    """``(prime power, [(generator, order), ...])`` for each local factor of (Z/m)^x."""
    comps = []
    for p, k in factorize(m) if m > 1 else []:
        pk = p**k
        if p == 2:
            if k == 1:
                comps.append((pk, []))
            elif k == 2:
                comps.append((pk, [(3, 2)]))
            else:
                comps.append((pk, [(pk - 1, 2), (5, 2 ** (k - 2))]))
        else:
            g = _primitive_root(p)
            if k > 1 and pow(g, p - 1, p * p) == 1:
                g += p
            comps.append((pk, [(g, (p - 1) * p ** (k - 1))]))
    return comps


@lru_cache(maxsize=None)
def _log_table(m: int) -> Tuple[Tuple[Tuple[int, int], ...], Dict[int, Tuple[int, ...]]]:
    """Generator orders and the discrete logs of every unit mod m."""
    comps = _components(m)
    gens: List[Tuple[int, int]] = []
    local_logs = []
    for pk, cg in comps:
        table: Dict[int, Tuple[int, ...]] = {}
        ranges = [range(o) for _, o in cg]
        for exps in itertools.product(*ranges):
            x = 1
            for (g, _), e in zip(cg, exps):
                x = x * pow(g, e, pk) % pk
            table[x] = exps
        local_logs.append((pk, table))
        gens.extend(cg)
    logs: Dict[int, Tuple[int, ...]] = {}
    for u in range(m):
        if math.gcd(u, m) != 1:
            continue
        logs[u] = tuple(itertools.chain.from_iterable(t[u % pk] for pk, t in local_logs))
    return tuple(gens), logs


def characters_mod(m: int) -> List[DirichletCharacter]:
    """All phi(m) characters mod m, principal first."""
    if m < 1:
        raise ValueError(f"modulus must be positive, got {m}")
    gens, logs = _log_table(m)
    orders = [o for _, o in gens]
    big = lcm(*orders) if orders else 1
    out = []
    for exps in itertools.product(*(range(o) for o in orders)):
        raw = {u: sum(e * l * (big // o) for e, l, o in zip(exps, ls, orders)) % big
               for u, ls in logs.items()}
        out.append(_make(m, raw, big))
    return out


def character_from_function(m: int, func: Callable[[int], int | complex]) -> DirichletCharacter:
    """The character mod m whose values agree with ``func`` on units."""
    for chi in characters_mod(m):
        if all(abs(chi(u) - func(u)) < 1e-12 for u, _ in chi.indices):
            return chi
    raise ValueError(f"no character mod {m} matches the given values")


def principal_character(m: int) -> DirichletCharacter:
    return characters_mod(m)[0]


def kronecker_character(d: int, modulus: int | None = None) -> DirichletCharacter:
    """``n -> (d|n)`` as a character mod ``|d|`` (or a multiple of it)."""
    m = abs(d) if modulus is None else modulus
    if m % abs(d):
        raise ValueError(f"{m} is not a multiple of |{d}|")
    return character_from_function(m, lambda u: kronecker_symbol(d, u))


def conductor(chi: DirichletCharacter) -> int:
    """Least divisor ``f`` of the modulus with ``chi`` trivial on units ``= 1 mod f``."""
    for f in divisors(chi.modulus):
        if all(k == 0 for u, k in chi.indices if u % f == 1 % f):
            return f
    return chi.modulus


def inner_product(chi1: DirichletCharacter, chi2: DirichletCharacter) -> int:
    """``sum_n chi1(n) conj(chi2(n))`` computed exactly in the cyclotomic field.

    ``chi1 conj(chi2)`` is a character, so its index counts are uniform on a
    subgroup of Z/N; the sum is phi(m) for the trivial subgroup and 0 otherwise.
    """
    if chi1.modulus != chi2.modulus:
        raise ValueError("characters have different moduli")
    big = lcm(chi1.order, chi2.order)
    t2 = chi2.table
    counts = [0] * big
    for u, k in chi1.indices:
        counts[(k * (big // chi1.order) - t2[u] * (big // chi2.order)) % big] += 1
    support = [j for j, c in enumerate(counts) if c]
    if support == [0]:
        return counts[0]
    step = support[1] - support[0]
    if big % step or support != list(range(0, big, step)) or len({counts[j] for j in support}) != 1:
        raise ArithmeticError("index distribution is not uniform on a subgroup")
    return 0


def check_l_beta(chi: DirichletCharacter, beta: float) -> None:
    if not math.isfinite(beta) or beta <= 0:
        raise ValueError(f"beta must exceed 0 (got {beta:g})")
    if chi.is_principal and beta <= 1:
        raise ValueError(f"beta must exceed 1 for a principal character (got {beta:g})")


def l_tail_bound(chi: DirichletCharacter, beta: float, cutoff: int) -> float:
    """Principal: the zeta tail. Otherwise Abel summation with ``|sum_{a<n<=b} chi(n)| <= B``."""
    if chi.is_principal:
        return zeta_tail(beta, cutoff)
    partial = np.cumsum(chi.value_array())
    b = 2.0 * float(np.max(np.abs(partial)))
    return b * (cutoff + 1) ** (-beta)


def dirichlet_L(chi: DirichletCharacter, beta: float, cutoff: int) -> SeriesValue:
    """``sum_{n <= L} chi(n) n^-beta``, grouped by residue class."""
    check_l_beta(chi, beta)
    check_cutoff(cutoff)
    weights = power_terms(beta, cutoff)
    m = chi.modulus
    total = 0j
    for u, k in chi.indices:
        # n = u, u + m, ... (n >= 1)
        start = u if u else m
        class_sum = ordered_sum(weights[start - 1::m])
        total += root_of_unity(k, chi.order) * class_sum
    return SeriesValue(complex(total), l_tail_bound(chi, beta, cutoff), cutoff, beta)


def twisted_trace(chi: DirichletCharacter, beta: float, cutoff: int) -> complex:
    """``Trace(a_chi e^{-beta H})`` with ``a_chi`` the diagonal operator ``eps_n -> chi(n) eps_n``."""
    check_l_beta(chi, beta)
    check_cutoff(cutoff)
    n = np.arange(1, cutoff + 1, dtype=np.int64)
    a_chi = chi.value_array()[n % chi.modulus]
    return ordered_sum(a_chi * power_terms(beta, cutoff))


def catalan_series(terms: int) -> float:
    """``sum_{k < terms} (-1)^k / (2k+1)^2`` in reverse order (an oracle for L(2, chi_-4))."""
    k = np.arange(terms - 1, -1, -1, dtype=float)
    return math.fsum((np.where(k % 2 == 0, 1.0, -1.0) / (2 * k + 1) ** 2).tolist())
