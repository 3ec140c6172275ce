import cmath
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bostconnes import groupoid
from bostconnes.arith import iter_coprime_rationals, lcm
from bostconnes.groupoid import (HeckeElement, SymmetryElement, adjoint, analytic_evolve,
                                 coarse_orbits, convolve, inner_mu,
                                 presentation_isomorphism_check, symmetry_act, time_evolve)

from conftest import hecke_elements

D2 = HeckeElement.delta(2)
HALF = HeckeElement.indicator(Fraction(1, 2), 0, 2)
ONE = HeckeElement.identity()
E2 = HeckeElement.indicator(1, 0, 2)


def sample_points(*fs, count=40):
    """Integer points rho; integers are dense in Z-hat, so they see every residue class."""
    m = lcm(*(f.level for f in fs))
    return range(-2 * m * 6, 2 * m * 6 + 1, 1)[:: max(1, (24 * m) // count)]


def convolution_oracle(f1, f2, g, rho):
    total = 0j
    for h in f2.support_elements():
        if rho % h.denominator:
            continue
        hrho = h * rho
        k = g / h
        if hrho.denominator == 1 and int(hrho) % k.denominator == 0:
            total += f1(k, int(hrho)) * f2(h, rho)
    return total


def adjoint_oracle(f, g, rho):
    grho = g * rho
    return f(1 / g, int(grho)).conjugate()


def candidate_gs(f1, f2):
    return {a * b for a in f1.support_elements() for b in f2.support_elements()}


def test_convolution_examples():
    assert convolve(D2, HALF) == E2
    assert convolve(HALF, D2) == ONE
    assert convolve(D2, HeckeElement.zero()).is_zero()
    assert convolve(HeckeElement.zero(), D2).is_zero()


def test_adjoint_examples():
    assert adjoint(D2) == HALF
    assert adjoint(ONE) == ONE


def test_time_evolution_examples():
    assert time_evolve(D2, 0.0) == D2
    t = 0.7
    v = time_evolve(D2, t)(2, 5)
    assert abs(v - cmath.exp(1j * t * math.log(2))) < 1e-15


def test_analytic_evolution_examples():
    assert analytic_evolve(ONE, 3.3) == ONE
    assert analytic_evolve(D2, 1.0) == D2.scale(0.5)
    f = HeckeElement.indicator(Fraction(3, 2), 2, 4, 2 + 1j)
    assert analytic_evolve(f, 0) == f


def test_symmetry_examples():
    f = HeckeElement.indicator(Fraction(3, 2), 2, 4, 2 + 1j)
    assert symmetry_act(f, SymmetryElement(1)) == f
    assert symmetry_act(HeckeElement.indicator(1, 1, 2), SymmetryElement(2)).is_zero()


def test_inner_mu_examples():
    assert inner_mu(1) == ONE
    assert inner_mu(2) == HALF
    assert inner_mu(3, 4).level == 12
    # mu mu* = 1 and mu* mu = e_n
    for n in (2, 3, 5):
        mu = inner_mu(n)
        assert convolve(mu, adjoint(mu)) == ONE
        assert convolve(adjoint(mu), mu) == HeckeElement.indicator(1, 0, n)


def test_delta_n_does_not_implement_theta():
    # with mu = delta_n one gets f(g, rho/n) on n | rho, not f(g, n rho)
    f = HeckeElement.indicator(1, 1, 2)
    wrong = convolve(convolve(D2, f), adjoint(D2))
    assert wrong != symmetry_act(f, SymmetryElement(2))
    assert convolve(convolve(HALF, f), adjoint(HALF)) == symmetry_act(f, SymmetryElement(2))


@given(hecke_elements(), hecke_elements())
def test_convolution_matches_pointwise_formula(f1, f2):
    prod = convolve(f1, f2)
    for g in candidate_gs(f1, f2) | {Fraction(1)}:
        for rho in sample_points(f1, f2, prod):
            if rho % g.denominator:
                continue
            assert prod(g, rho) == convolution_oracle(f1, f2, g, rho)


@given(hecke_elements())
def test_adjoint_matches_pointwise_formula(f):
    fa = adjoint(f)
    for g in {1 / h for h in f.support_elements()}:
        for rho in sample_points(f, fa):
            if rho % g.denominator == 0:
                assert fa(g, rho) == adjoint_oracle(f, g, rho)


@given(hecke_elements(), hecke_elements(), hecke_elements())
def test_associativity(f1, f2, f3):
    assert convolve(convolve(f1, f2), f3) == convolve(f1, convolve(f2, f3))


@given(hecke_elements(), hecke_elements())
def test_adjoint_reverses_products(f1, f2):
    assert adjoint(convolve(f1, f2)) == convolve(adjoint(f2), adjoint(f1))


@given(hecke_elements())
def test_adjoint_is_involution(f):
    assert adjoint(adjoint(f)) == f


@given(hecke_elements(), hecke_elements(), st.integers(2, 4),
       st.floats(-10, 10, allow_nan=False))
def test_level_raising_is_invisible(f1, f2, k, t):
    g1 = f1.at_level(f1.level * k)
    assert g1 == f1 and g1.level == f1.level * k
    for a, b in [(convolve(f1, f2), convolve(g1, f2)), (adjoint(f1), adjoint(g1)),
                 (time_evolve(f1, t), time_evolve(g1, t))]:
        for g in set(a.support_elements()) | set(b.support_elements()):
            for rho in sample_points(a, b):
                if rho % g.denominator == 0:
                    assert a(g, rho) == b(g, rho)


@given(hecke_elements(), st.floats(-10, 10, allow_nan=False), st.floats(-10, 10, allow_nan=False))
def test_time_evolution_group_law(f, s, t):
    assert time_evolve(time_evolve(f, s), t).allclose(time_evolve(f, s + t), 1e-12)


@given(hecke_elements(), hecke_elements(), st.floats(-10, 10, allow_nan=False))
def test_time_evolution_is_multiplicative(f1, f2, t):
    lhs = time_evolve(convolve(f1, f2), t)
    rhs = convolve(time_evolve(f1, t), time_evolve(f2, t))
    assert lhs.allclose(rhs, 1e-12)


@given(hecke_elements(), st.integers(1, 6), st.integers(1, 6), st.sampled_from([1, -1]),
       st.sampled_from([1, -1]))
def test_theta_is_a_semigroup_action(f, m, n, s1, s2):
    a, b = SymmetryElement(m, s1), SymmetryElement(n, s2)
    assert symmetry_act(symmetry_act(f, a), b) == symmetry_act(f, a.compose(b))


@given(hecke_elements(), st.integers(1, 6), st.sampled_from([1, -1]),
       st.floats(-10, 10, allow_nan=False))
def test_theta_commutes_with_time_evolution(f, n, sign, t):
    s = SymmetryElement(n, sign)
    a = symmetry_act(time_evolve(f, t), s)
    b = time_evolve(symmetry_act(f, s), t)
    assert a.support_elements() == b.support_elements()
    assert a.allclose(b, 1e-12)


@given(hecke_elements(), hecke_elements(), st.sampled_from([1, -1]))
def test_sign_symmetry_is_multiplicative(f1, f2, sign):
    s = SymmetryElement(1, sign)
    assert symmetry_act(convolve(f1, f2), s) == convolve(symmetry_act(f1, s), symmetry_act(f2, s))


@given(hecke_elements(), hecke_elements(), st.sampled_from([2, 3, 5]))
def test_theta_n_multiplicative_when_denominators_are_prime_to_n(f1, f2, n):
    if any(math.gcd(h.denominator, n) > 1 for h in f2.support_elements()):
        return
    s = SymmetryElement(n)
    assert symmetry_act(convolve(f1, f2), s) == convolve(symmetry_act(f1, s), symmetry_act(f2, s))


def test_theta_n_is_not_multiplicative_in_general():
    s = SymmetryElement(2)
    lhs = symmetry_act(convolve(D2, HALF), s)
    rhs = convolve(symmetry_act(D2, s), symmetry_act(HALF, s))
    assert lhs == ONE and rhs == E2


@given(hecke_elements(max_height=6, max_level=12), st.sampled_from([2, 3, 5]),
       st.integers(1, 12))
def test_inner_mu_implements_theta(f, n, level):
    mu = inner_mu(n, level)
    assert convolve(convolve(mu, f), adjoint(mu)) == symmetry_act(f, SymmetryElement(n))


def test_canonical_form_and_equality():
    f = HeckeElement(4, {(Fraction(3), 1): 2, (Fraction(3), 3): 2})
    c = f.canonical()
    assert c.level == 2 and c == f and hash(c) == hash(f)
    assert HeckeElement(6, {(Fraction(1, 2), 0): 0}).is_zero()


def test_validation():
    with pytest.raises(ValueError, match="not in the groupoid"):
        HeckeElement(4, {(Fraction(1, 2), 1): 1})
    with pytest.raises(ValueError, match="does not divide the level"):
        HeckeElement(3, {(Fraction(1, 2), 0): 1})
    with pytest.raises(ValueError, match="positive rational"):
        HeckeElement(1, {(Fraction(-1), 0): 1})
    with pytest.raises(ValueError):
        SymmetryElement(0)
    with pytest.raises(ValueError):
        SymmetryElement(2, 0)
    with pytest.raises(ValueError):
        D2(Fraction(1, 2), 1)


@given(hecke_elements(integral=False))
def test_json_round_trip_is_exact(f):
    back = HeckeElement.from_json(f.to_json())
    assert back.level == f.level and back.entries == f.entries


def orbit_oracle(level, bound):
    """Union-find over integer points, which meet every residue class."""
    parent = {(r, z): (r, z) for r in range(level) for z in (1, -1)}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    span = level * math.lcm(*range(1, bound + 1))
    for g in iter_coprime_rationals(bound):
        for rho in range(-span, span + 1):
            if rho % g.denominator:
                continue
            for s in (1, -1):
                target = s * g.numerator * rho // g.denominator
                for z in (1, -1):
                    a, b = find((rho % level, z)), find((target % level, s * z))
                    parent[a] = b
    groups = {}
    for x in parent:
        groups.setdefault(find(x), []).append(x)
    return sorted(sorted(v) for v in groups.values())


@pytest.mark.parametrize("level,bound", [(1, 1), (2, 2), (4, 2), (5, 1), (5, 2), (6, 3), (9, 2)])
def test_coarse_orbits_match_integer_oracle(level, bound):
    assert coarse_orbits(level, bound) == orbit_oracle(level, bound)


def test_coarse_orbit_examples():
    assert len(coarse_orbits(1, 3)) == 1
    assert len(coarse_orbits(2, 2)) == 1
    # 2 generates (Z/5)^x
    orbits = coarse_orbits(5, 2)
    units = {(u, 1) for u in range(1, 5)}
    assert any(units <= set(o) for o in orbits)


def test_presentation_isomorphism_examples():
    r = presentation_isomorphism_check(12, 12)
    assert r.ok and r.classical_count == r.principal_orbit_count == 333
    assert r.principal_count == 4 * r.classical_count
    one = presentation_isomorphism_check(1, 1)
    assert one.ok and one.classical_count == one.principal_orbit_count == 1


def test_presentation_check_detects_a_broken_quotient(monkeypatch):
    # forgetting the sign component makes orbit keys ill defined
    monkeypatch.setattr(groupoid, "_orbit_key", lambda num, den, rho, z: (abs(num), den, rho))
    r = presentation_isomorphism_check(6, 4)
    assert not r.ok and r.to_json()["mismatch_count"] > 0


def test_random_element_is_valid():
    rng = random.Random(5)
    for _ in range(50):
        f = groupoid.random_element(rng)
        assert not f.is_zero()
