import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bostconnes.arith import ResidueClass
from bostconnes.groupoid import HeckeElement, adjoint, convolve, time_evolve
from bostconnes.spectral import (GibbsState, base_residue, commutant_dimensions,
                                 commutant_probe, commutant_report, entry, gibbs_evaluate,
                                 gns_check, hamiltonian_conjugation_check, interior_size,
                                 kms_check, norm_bound, partition_function, represent, zeta_tail)

from conftest import hecke_elements

GOLDEN = Path(__file__).parent / "golden" / "commutant.json"
D2 = HeckeElement.delta(2)
ONE = HeckeElement.identity()
E2 = HeckeElement.indicator(1, 0, 2)


def test_identity_represents_identity():
    assert np.array_equal(represent(ONE, 1, 10).dense(), np.eye(10))


def test_delta2_matrix():
    a = represent(D2, 1, 4).dense()
    expected = np.zeros((4, 4))
    expected[1, 0] = expected[3, 1] = 1
    assert np.array_equal(a, expected)


@given(hecke_elements(max_level=12), st.sampled_from([1, 5, 7, 11]))
def test_entries_follow_the_defining_formula(f, r0):
    if math.gcd(r0, f.level) != 1:
        return
    a = represent(f, r0, 20).dense()
    for n in range(1, 21):
        for m in range(1, 21):
            assert a[n - 1, m - 1] == entry(f, r0, n, m)


def test_noninvertible_base_point_rejected():
    f = HeckeElement.indicator(1, 1, 4)
    with pytest.raises(ValueError, match="not invertible"):
        represent(f, 2, 8)
    with pytest.raises(ValueError, match="not invertible"):
        represent(f, ResidueClass(6, 3), 8)


def test_residue_class_base_point_is_one_coherent_unit():
    rho0 = ResidueClass(4, 3)
    for level in (2, 3, 4, 12, 24, 60):
        r = base_residue(rho0, level)
        assert math.gcd(r, level) == 1
        assert r % math.gcd(4, level) == 3 % math.gcd(4, level)
        assert base_residue(rho0, 120) % level == r


@given(hecke_elements(), hecke_elements(), st.sampled_from([1, 7, 11, 13]))
def test_products_agree_on_the_interior_block(f1, f2, r0):
    cutoff = 64
    level = convolve(f1, f2).level * f1.level * f2.level
    if math.gcd(r0, level) != 1:
        return
    b = interior_size(cutoff, f1, f2)
    lhs = represent(convolve(f1, f2), r0, cutoff).dense()[:b, :b]
    rhs = (represent(f1, r0, cutoff).dense() @ represent(f2, r0, cutoff).dense())[:b, :b]
    assert np.array_equal(lhs, rhs)


@given(hecke_elements())
def test_adjoint_is_conjugate_transpose_on_the_interior(f):
    cutoff = 48
    b = interior_size(cutoff, f)
    lhs = represent(adjoint(f), 1, cutoff).dense()[:b, :b]
    rhs = represent(f, 1, cutoff).dense().conj().T[:b, :b]
    assert np.array_equal(lhs, rhs)


def test_hamiltonian_examples():
    assert hamiltonian_conjugation_check(D2, 1, 64, 0.0) == 0.0
    assert hamiltonian_conjugation_check(D2, 1, 64, 1.0) <= 1e-12


@given(hecke_elements(integral=False), st.floats(-10, 10, allow_nan=False))
def test_hamiltonian_generates_time_evolution(f, t):
    assert hamiltonian_conjugation_check(f, 1, 64, t) <= 1e-12


def test_partition_function_examples():
    z2 = partition_function(2, 10**6)
    assert abs(z2.value - math.pi**2 / 6) <= 1e-6
    assert partition_function(2, 1).value == 1.0
    assert abs(partition_function(4, 10**4).value - math.pi**4 / 90) <= 1e-11
    assert z2.tail_bound == zeta_tail(2, 10**6)


@pytest.mark.parametrize("beta", [1.0, 0.5, -2.0, float("inf")])
def test_divergent_beta_rejected(beta):
    with pytest.raises(ValueError, match="beta must exceed 1"):
        partition_function(beta, 10)


def test_partition_tail_bound_is_rigorous():
    for beta in (1.5, 2.0, 3.0):
        for cutoff in (10, 100, 1000):
            exact = partition_function(beta, 10**6).value + zeta_tail(beta, 10**6)
            gap = exact - partition_function(beta, cutoff).value
            assert 0 < gap <= zeta_tail(beta, cutoff)


def test_gibbs_examples():
    state = GibbsState(2.0)
    assert gibbs_evaluate(state, ONE).value == 1
    v = gibbs_evaluate(state, E2)
    direct = sum(n**-2.0 for n in range(2, 10**4 + 1, 2)) / sum(n**-2.0 for n in range(1, 10**4 + 1))
    assert abs(v.value - direct) < 1e-15
    assert abs(v.value - 0.25) <= v.error_bound
    assert gibbs_evaluate(state, D2).value == 0


@given(hecke_elements(integral=False))
def test_gibbs_is_positive(f):
    state = GibbsState(2.0, 1, 2000)
    v = gibbs_evaluate(state, convolve(adjoint(f), f))
    assert v.value.real >= -v.error_bound and abs(v.value.imag) <= max(v.error_bound, 1e-15)


def test_kms_examples():
    assert kms_check(GibbsState(2.0), ONE, ONE).residual == 0
    r = kms_check(GibbsState(2.0, 1, 10**4), D2, adjoint(D2))
    assert r.residual <= r.tolerance


@given(hecke_elements(integral=False), hecke_elements(integral=False),
       st.sampled_from([1.5, 2.0, 3.0]))
def test_kms_condition_within_truncation_tolerance(f1, f2, beta):
    small = kms_check(GibbsState(beta, 1, 2000), f1, f2)
    assert small.residual <= small.tolerance
    large = kms_check(GibbsState(beta, 1, 4000), f1, f2)
    assert large.residual <= small.residual + zeta_tail(beta, 2000) + 1e-15


def test_gns_examples():
    state = GibbsState(2.0)
    assert gns_check(state, ONE).deviation <= 1e-15
    assert gns_check(state, E2).deviation <= 1e-10


@given(hecke_elements(integral=False), st.sampled_from([1.5, 2.0, 3.0]))
def test_gns_vector_reproduces_the_state(f, beta):
    assert gns_check(GibbsState(beta), f, 128).deviation <= 1e-10


@pytest.mark.parametrize("beta", [1.5, 2.0, 3.0])
def test_gns_weights_with_exponent_minus_half_fail(beta):
    r = gns_check(GibbsState(beta), E2, 256, weight_exponent=-0.5)
    assert r.deviation > 1e-3


def test_norm_bound_examples():
    r = norm_bound(ONE)
    assert (r.estimate, r.bound) == (1.0, 1.0)
    r = norm_bound(D2)
    assert abs(r.estimate - 1) < 1e-12 and r.bound == 1


@given(hecke_elements(integral=False))
def test_norm_estimate_below_l1_bound(f):
    r = norm_bound(f, 1, 32)
    top = np.linalg.svd(represent(f, 1, 32).dense(), compute_uv=False)[0]
    assert r.estimate <= top * (1 + 1e-12) + 1e-15
    assert r.estimate <= r.bound * (1 + 1e-12)


def test_commutant_trivial_cases():
    assert commutant_probe([ONE], 1, 6) == 36
    assert commutant_probe([], 1, 6) == 36


def test_commutant_small_suite_is_monotone():
    fs = [HeckeElement.delta(p) for p in (2, 3, 5, 7)] + \
        [HeckeElement.indicator(1, r, 4) for r in range(4)]
    dims = commutant_dimensions(fs, 1, 16)
    assert all(a >= b for a, b in zip(dims, dims[1:]))


def test_commutant_golden_file():
    golden = json.loads(GOLDEN.read_text())
    small = {"primes_to_cutoff": {"prime_bound": None, "cutoffs": (8, 12)}}
    fresh = commutant_report(small)
    runs = golden["suites"]["primes_to_cutoff"]["runs"][:2]
    assert fresh["suites"]["primes_to_cutoff"]["runs"] == runs
