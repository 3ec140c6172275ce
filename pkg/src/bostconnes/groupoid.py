"""Finite-level Bost-Connes groupoid and its Hecke algebra over Q.

A :class:`HeckeElement` is a finitely supported function ``f(g, rho)`` on pairs
``g`` in Q_+^*, ``rho`` in Z-hat with ``g * rho`` in Z-hat. It is stored at a
single level ``M``: the value at ``(g, rho)`` depends only on ``rho mod M``.
Membership of ``(g, rho)`` in the groupoid requires ``denominator(g) | rho``,
which is decidable mod ``M`` as long as ``denominator(g) | M``.
"""
from __future__ import annotations

import cmath
import json
import math
import random
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np

from .arith import ResidueClass, factorize, height, iter_coprime_rationals, lcm

Key = Tuple[Fraction, int]


class HeckeElement:
    """Locally constant, compactly supported function on the truncated groupoid.

    ``entries`` maps ``(g, r)`` to the value of ``f`` on ``{(g, rho): rho = r mod level}``.
    Any level that is a common period is a valid representation; ``==`` compares
    the canonical (coarsest) representations.
    """

    __slots__ = ("level", "_entries", "_canonical")

    def __init__(self, level: int, entries: Mapping[Key, complex] | None = None):
        if level < 1:
            raise ValueError(f"level must be positive, got {level}")
        clean: Dict[Key, complex] = {}
        for (g, r), c in (entries or {}).items():
            g = Fraction(g)
            if g <= 0:
                raise ValueError(f"group element must be a positive rational, got {g}")
            q = g.denominator
            if level % q:
                raise ValueError(f"denominator of {g} does not divide the level {level}")
            if not 0 <= r < level:
                raise ValueError(f"residue {r} not reduced mod {level}")
            if r % q:
                raise ValueError(f"({g}, {r} mod {level}) is not in the groupoid: "
                                 f"{q} does not divide the residue")
            c = complex(c)
            if c != 0:
                clean[(g, r)] = c
        self.level = level
        self._entries = clean
        self._canonical: Optional[HeckeElement] = None

    # -- construction ------------------------------------------------------

    @classmethod
    def zero(cls) -> "HeckeElement":
        return cls(1, {})

    @classmethod
    def indicator(cls, g, residue: int = 0, modulus: int = 1, value: complex = 1) -> "HeckeElement":
        """``value`` times the indicator of ``{(g, rho) : rho = residue mod modulus}``.

        The modulus is raised to a multiple of ``denominator(g)``; classes that
        leave the groupoid are dropped.
        """
        g = Fraction(g)
        level = lcm(modulus, g.denominator)
        entries = {}
        for cls_ in ResidueClass.of(residue, modulus).refine(level):
            if cls_.residue % g.denominator == 0:
                entries[(g, cls_.residue)] = value
        return cls(level, entries)

    @classmethod
    def delta(cls, g, value: complex = 1) -> "HeckeElement":
        """Indicator of ``{(g, rho) : g rho in Z-hat}``."""
        return cls.indicator(g, 0, 1, value)

    @classmethod
    def identity(cls) -> "HeckeElement":
        return cls.delta(1)

    # -- access ------------------------------------------------------------

    @property
    def entries(self) -> Mapping[Key, complex]:
        return dict(self._entries)

    def items(self):
        return self._entries.items()

    def __len__(self) -> int:
        return len(self._entries)

    def is_zero(self) -> bool:
        return not self._entries

    def support_elements(self) -> List[Fraction]:
        return sorted({g for g, _ in self._entries})

    def max_height(self) -> int:
        return max((height(g) for g in self.support_elements()), default=1)

    def sup_norm(self) -> float:
        return max((abs(c) for c in self._entries.values()), default=0.0)

    def l1_bound(self) -> float:
        """Sum over group elements of the largest coefficient attached to each."""
        best: Dict[Fraction, float] = defaultdict(float)
        for (g, _), c in self._entries.items():
            best[g] = max(best[g], abs(c))
        return math.fsum(best.values())

    def __call__(self, g, rho: int) -> complex:
        """Value at ``(g, rho)`` for an integer point ``rho`` of Z-hat."""
        g = Fraction(g)
        if rho % g.denominator:
            raise ValueError(f"({g}, {rho}) is not in the groupoid")
        if self.level % g.denominator:
            return 0j
        return self._entries.get((g, rho % self.level), 0j)

    # -- levels ------------------------------------------------------------

    def at_level(self, level: int) -> "HeckeElement":
        """The same function represented at a multiple of the current level."""
        if level % self.level:
            raise ValueError(f"{level} is not a multiple of {self.level}")
        k = level // self.level
        entries = {}
        for (g, r), c in self._entries.items():
            for i in range(k):
                entries[(g, r + self.level * i)] = c
        return HeckeElement(level, entries)

    def canonical(self) -> "HeckeElement":
        """Coarsest representation: merge classes with equal coefficients."""
        if self._canonical is None:
            level, entries = self.level, self._entries
            for p, _ in factorize(level):
                while level % p == 0 and _has_period(entries, level, level // p):
                    coarse = level // p
                    entries = {(g, r % coarse): c for (g, r), c in entries.items()}
                    level = coarse
            out = HeckeElement(level, entries)
            out._canonical = out
            self._canonical = out
        return self._canonical

    def __eq__(self, other) -> bool:
        if not isinstance(other, HeckeElement):
            return NotImplemented
        a, b = self.canonical(), other.canonical()
        return a.level == b.level and a._entries == b._entries

    def __hash__(self):
        c = self.canonical()
        return hash((c.level, frozenset(c._entries.items())))

    def allclose(self, other: "HeckeElement", tol: float = 1e-12) -> bool:
        """Same support as functions, coefficients within ``tol``."""
        level = lcm(self.level, other.level)
        a = self.at_level(level)._entries
        b = other.at_level(level)._entries
        keys = set(a) | set(b)
        return all(abs(a.get(k, 0) - b.get(k, 0)) <= tol for k in keys)

    def __repr__(self) -> str:
        body = ", ".join(f"({g}, {r}): {c:g}" for (g, r), c in sorted(self._entries.items()))
        return f"HeckeElement(level={self.level}, {{{body}}})"

    # -- algebra sugar -----------------------------------------------------

    def __mul__(self, other: "HeckeElement") -> "HeckeElement":
        return convolve(self, other)

    def __add__(self, other: "HeckeElement") -> "HeckeElement":
        level = lcm(self.level, other.level)
        out = dict(self.at_level(level)._entries)
        for k, c in other.at_level(level)._entries.items():
            out[k] = out.get(k, 0) + c
        return HeckeElement(level, out).canonical()

    def scale(self, c: complex) -> "HeckeElement":
        return HeckeElement(self.level, {k: c * v for k, v in self._entries.items()}).canonical()

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        entries = [
            {"num": g.numerator, "den": g.denominator, "residue": r,
             "re": c.real, "im": c.imag}
            for (g, r), c in sorted(self._entries.items())
        ]
        return {"level": self.level, "entries": entries}

    @classmethod
    def from_json(cls, data: dict) -> "HeckeElement":
        entries = {}
        for e in data["entries"]:
            entries[(Fraction(e["num"], e["den"]), e["residue"])] = complex(e["re"], e["im"])
        return cls(int(data["level"]), entries)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _has_period(entries: Mapping[Key, complex], level: int, coarse: int) -> bool:
    for (g, r), c in entries.items():
        if coarse % g.denominator:
            return False
        base = r % coarse
        for i in range(level // coarse):
            if entries.get((g, base + coarse * i)) != c:
                return False
    return True


# --- algebra operations ---------------------------------------------------

def convolve(f1: HeckeElement, f2: HeckeElement) -> HeckeElement:
    """``(f1*f2)(g, rho) = sum_h f1(g h^-1, h rho) f2(h, rho)``."""
    if f1.is_zero() or f2.is_zero():
        return HeckeElement.zero()
    m1, m2 = f1.level, f2.level
    level = lcm(m1, m2, *(h.denominator * m1 for h in f2.support_elements()))
    by_residue: Dict[int, List[Tuple[Fraction, complex]]] = defaultdict(list)
    for (k, r1), c1 in f1.items():
        by_residue[r1].append((k, c1))
    out: Dict[Key, complex] = defaultdict(complex)
    for (h, r2), c2 in f2.items():
        p, q = h.numerator, h.denominator
        for s in range(r2, level, m2):
            # rho = s mod level; q | s, and h*rho mod m1 is determined
            t = (p * (s // q)) % m1
            for k, c1 in by_residue.get(t, ()):
                out[(k * h, s)] += c1 * c2
    return HeckeElement(level, out).canonical()


def adjoint(f: HeckeElement) -> HeckeElement:
    """``f*(g, rho) = conj f(g^-1, g rho)``."""
    if f.is_zero():
        return HeckeElement.zero()
    pieces = []
    for (k, r), c in f.items():
        p, q = k.numerator, k.denominator
        # {k rho : rho = r mod M} is the class p r/q mod p M/q
        pieces.append((Fraction(q, p), p * (r // q), p * f.level // q, c.conjugate()))
    level = lcm(*(n for _, _, n, _ in pieces))
    out: Dict[Key, complex] = {}
    for g, s, n, c in pieces:
        for i in range(level // n):
            out[(g, s + n * i)] = c
    return HeckeElement(level, out).canonical()


def time_evolve(f: HeckeElement, t: float) -> HeckeElement:
    """``sigma_t(f)(g, rho) = g^{it} f(g, rho)``."""
    out = {}
    for (g, r), c in f.items():
        phase = cmath.exp(1j * t * (math.log(g.numerator) - math.log(g.denominator)))
        out[(g, r)] = c * phase
    return HeckeElement(f.level, out).canonical()


def analytic_evolve(f: HeckeElement, beta: float) -> HeckeElement:
    """``sigma_{i beta}(f)(g, rho) = g^{-beta} f(g, rho)``."""
    out = {}
    for (g, r), c in f.items():
        out[(g, r)] = c * (g.denominator / g.numerator) ** beta if beta else c
    return HeckeElement(f.level, out).canonical()


@dataclass(frozen=True)
class SymmetryElement:
    """An element ``n`` of N^x (the finite symmetries over Q) and an archimedean sign."""

    n: int
    sign: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"symmetry needs n >= 1, got {self.n}")
        if self.sign not in (1, -1):
            raise ValueError(f"archimedean sign must be +1 or -1, got {self.sign}")

    def compose(self, other: "SymmetryElement") -> "SymmetryElement":
        return SymmetryElement(self.n * other.n, self.sign * other.sign)


def symmetry_act(f: HeckeElement, s: SymmetryElement) -> HeckeElement:
    """``theta_s(f)(g, rho) = f(g, sign * n * rho)``.

    The sign acts on the {+1, -1} component; in the classical presentation the
    point ``(rho, -1)`` is identified with ``(-rho, +1)``, so it shows up as
    ``rho -> -rho``.
    """
    if f.is_zero():
        return HeckeElement.zero()
    level = f.level
    mult = s.sign * s.n
    out = {}
    for g in f.support_elements():
        q = g.denominator
        for r in range(0, level, q):
            c = f._entries.get((g, (mult * r) % level))
            if c is not None:
                out[(g, r)] = c
    return HeckeElement(level, out).canonical()


def inner_mu(n: int, level: int = 1) -> HeckeElement:
    """The isometry-type element realizing theta_(n,n) as an inner automorphism.

    It is the indicator of ``g = 1/n`` (on ``n | rho``), so that
    ``mu * f * adjoint(mu) == symmetry_act(f, SymmetryElement(n))``.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if level < 1:
        raise ValueError(f"level must be positive, got {level}")
    return HeckeElement.indicator(Fraction(1, n), 0, n).at_level(lcm(level, n))


def random_element(rng: random.Random, max_height: int = 4, max_level: int = 6,
                   terms: int = 3, gaussian_integers: bool = True) -> HeckeElement:
    """Random nonzero element; integer coefficients keep convolution sums exact."""
    entries: Dict[Key, complex] = {}
    level = rng.randint(1, max_level)
    gs = []
    for _ in range(terms):
        g = Fraction(rng.randint(1, max_height), rng.randint(1, max_height))
        gs.append(g)
    level = lcm(level, *(g.denominator for g in gs))
    for g in gs:
        r = rng.randrange(0, level, g.denominator)
        if gaussian_integers:
            c = complex(rng.randint(-3, 3), rng.randint(-3, 3)) or 1
        else:
            c = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        entries[(g, r)] = c
    return HeckeElement(level, entries)


# --- unit-space orbits ----------------------------------------------------

def coarse_orbits(level: int, bound: int) -> List[List[Tuple[int, int]]]:
    """Orbits of ``(rho mod level, z)`` under the partial action of Q^x.

    Moves are ``g = +-p/q`` with ``p, q <= bound``: ``(rho, z) -> (g rho, sign(g) z)``
    whenever ``q | rho``. Returns the partition as sorted lists of
    ``(residue, sign)`` pairs.
    """
    if level < 1 or bound < 1:
        raise ValueError("level and bound must be positive")
    points = [(r, z) for r in range(level) for z in (1, -1)]
    index = {pt: i for i, pt in enumerate(points)}
    parent = list(range(len(points)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for g in iter_coprime_rationals(bound):
        p, q = g.numerator, g.denominator
        big = lcm(level, q)
        for r in range(level):
            # representatives of {rho = r mod level, q | rho} modulo lcm(level, q)
            reps = [r + level * i for i in range(big // level) if (r + level * i) % q == 0]
            for rho in reps:
                step = big // q
                for j in range(level):
                    target = (p * (rho // q + step * j)) % level
                    for z in (1, -1):
                        union(index[(r, z)], index[(target, z)])
                        union(index[(r, z)], index[((-target) % level, -z)])
    groups: Dict[int, List[Tuple[int, int]]] = defaultdict(list)
    for pt in points:
        groups[find(index[pt])].append(pt)
    return sorted(sorted(v) for v in groups.values())


# --- presentation comparison ----------------------------------------------

_GAMMA = ((1, 1), (1, -1), (-1, 1), (-1, -1))


@dataclass
class IsomorphismReport:
    level: int
    bound: int
    classical_count: int
    principal_count: int
    principal_orbit_count: int
    unit_count: int
    composable_pairs: int
    mismatches: List[str]

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {
            "level": self.level, "bound": self.bound,
            "classical_count": self.classical_count,
            "principal_count": self.principal_count,
            "principal_orbit_count": self.principal_orbit_count,
            "unit_count": self.unit_count,
            "composable_pairs": self.composable_pairs,
            "bijection": self.ok,
            "mismatch_count": len(self.mismatches),
            "mismatches": self.mismatches[:20],
        }


def _orbit_key(num: int, den: int, rho: int, z: int) -> Tuple[int, int, int]:
    # (g, rho, z) ~ (a g b, b rho, b z): take b = z, then a = sign(g z)
    return (abs(num), den, z * rho)


def presentation_isomorphism_check(level: int, bound: int) -> IsomorphismReport:
    """Compare the classical and the {+-1}-quotient presentations on a finite fragment.

    Points of Z-hat are sampled by the integers ``|rho| < level``; arrows are
    group elements of height at most ``bound`` whose source and target both lie
    in that window. The principal side is built from ``Q^x x Z x {+-1}`` and
    quotiented by ``(g, rho, z) -> (a g b, b rho, b z)`` for ``a, b = +-1``.
    Composition on the quotient is computed from non-canonical representatives,
    so well-definedness is exercised, not assumed.
    """
    if level < 1 or bound < 1:
        raise ValueError("level and bound must be positive")
    window = range(-(level - 1), level)
    rats = [(g.numerator, g.denominator) for g in iter_coprime_rationals(bound)]
    mismatches: List[str] = []

    classical = [(p, q, rho) for p, q in rats for rho in window
                 if rho % q == 0 and abs(p * rho // q) < level]
    classical_set = set(classical)

    # principal fragment and its quotient
    orbit_keys = set()
    principal_count = 0
    for p, q in rats:
        for s in (1, -1):
            for rho in window:
                if rho % q or abs(p * rho // q) >= level:
                    continue
                for z in (1, -1):
                    principal_count += 1
                    key = _orbit_key(s * p, q, rho, z)
                    members = {_orbit_key(a * s * p * b, q, b * rho, b * z) for a, b in _GAMMA}
                    if len(members) != 1:
                        mismatches.append(f"orbit of ({s * p}/{q}, {rho}, {z}) has no unique key")
                    orbit_keys.add(key)
                    # source and target must descend to the unit quotient
                    tgt = (s * p * rho // q) * (s * z)  # unit key of (g rho, sign(g) z)
                    if key[2] != z * rho or tgt != p * key[2] // q:
                        mismatches.append(f"({s * p}/{q}, {rho}, {z}): source/target not preserved")

    images = {_orbit_key(p, q, rho, 1) for p, q, rho in classical}
    if len(images) != len(classical):
        mismatches.append("map from the classical fragment is not injective")
    for key in sorted(orbit_keys - images):
        mismatches.append(f"principal orbit {key} has no classical preimage")
    for key in sorted(images - orbit_keys):
        mismatches.append(f"classical element {key} maps outside the principal fragment")

    pairs = _check_compositions(classical, level, mismatches)
    return IsomorphismReport(level, bound, len(classical), principal_count, len(orbit_keys),
                             len(window), pairs, mismatches)


def _check_compositions(classical, level: int, mismatches: List[str]) -> int:
    """Compose every composable pair on the quotient side and compare keys."""
    incoming: Dict[int, List[tuple]] = defaultdict(list)
    outgoing: Dict[int, List[tuple]] = defaultdict(list)
    for i, (p, q, rho) in enumerate(classical):
        incoming[p * rho // q].append((p, q, rho, i % 4))
        outgoing[rho].append((p, q, (i // 4) % 4))
    pairs = 0
    for mid in sorted(incoming):
        if mid not in outgoing:
            continue
        bp, bq, brho, bk = (np.array(c, dtype=np.int64) for c in zip(*incoming[mid]))
        ap, aq, ak = (np.array(c, dtype=np.int64) for c in zip(*outgoing[mid]))
        gam = np.array(_GAMMA, dtype=np.int64)
        # representative of b: (a b g, b rho, b)
        b_a, b_b = gam[bk, 0], gam[bk, 1]
        b_num = b_a * b_b * bp
        b_rho = b_b * brho
        t_rho = b_num * b_rho // bq
        t_z = np.sign(b_num) * b_b
        # representative of a whose source is the target of b: its b-component is t_z
        a_a = gam[ak, 0]
        a_num = a_a[:, None] * t_z[None, :] * ap[:, None]
        a_src = t_z[None, :] * mid
        ok_src = a_src == t_rho[None, :]
        num = a_num * b_num[None, :]
        den = aq[:, None] * bq[None, :]
        g = np.gcd(num, den)
        key_num, key_den = np.abs(num) // g, den // g
        key_rho = b_b * b_rho  # z * rho of the composite's representative
        # classical composite
        c_num, c_den = ap[:, None] * bp[None, :], aq[:, None] * bq[None, :]
        cg = np.gcd(c_num, c_den)
        good = ok_src & (key_num == c_num // cg) & (key_den == c_den // cg) \
            & (key_rho[None, :] == brho[None, :])
        pairs += good.size
        if not good.all():
            for i, j in zip(*np.nonzero(~good)):
                mismatches.append(
                    f"composition of ({ap[i]}/{aq[i]}, {mid}) and "
                    f"({bp[j]}/{bq[j]}, {brho[j]}) not preserved")
                if len(mismatches) > 100:
                    return pairs
    return pairs


def groupoid_points(f: HeckeElement, rhos: Iterable[int]) -> List[Tuple[Fraction, int]]:
    """Groupoid elements ``(g, rho)`` with ``g`` in the support of ``f``."""
    return [(g, rho) for g in f.support_elements() for rho in rhos if rho % g.denominator == 0]
