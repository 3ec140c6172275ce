import math
import threading
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bostconnes.arith import (SIEVE_LIMIT, SIGMA1, MultiplicativeFunction, ResidueClass,
                              divisor_sigma1, divisors, euler_phi, evaluate_multiplicative,
                              factorize, fundamental_discriminant_error, kronecker_symbol,
                              multiplicative_table, positive_rational, primes_up_to)
from bostconnes.numberfield import QuadraticField

FUNDAMENTAL = [-3, -4, -7, -8, -11, -15, -20, -23, -24, 5, 8, 12, 13, 17, 21, 24, 28, 40]


def legendre_oracle(d, p):
    """(d|p) for an odd prime p by listing squares."""
    if d % p == 0:
        return 0
    return 1 if any((x * x - d) % p == 0 for x in range(p)) else -1


def kronecker_oracle(d, n):
    out = 1
    for p, k in factorize(n) if n > 1 else []:
        if p == 2:
            s = 0 if d % 2 == 0 else (1 if d % 8 in (1, 7) else -1)
        else:
            s = legendre_oracle(d, p)
        out *= s ** k
    return out


def test_kronecker_examples():
    assert kronecker_symbol(-4, 5) == 1
    assert kronecker_symbol(-4, 2) == 0
    assert kronecker_symbol(5, 19) == 1


def test_kronecker_matches_square_oracle():
    for d in FUNDAMENTAL:
        for n in range(1, 200):
            assert kronecker_symbol(d, n) == kronecker_oracle(d, n), (d, n)


def test_kronecker_totally_multiplicative():
    for d in (-4, -3, 5, 8):
        table = [0] + [kronecker_symbol(d, n) for n in range(1, 1001)]
        for m in range(1, 1001):
            for n in range(1, 1000 // m + 1):
                assert table[m * n] == table[m] * table[n]


@pytest.mark.parametrize("d,word", [(0, "not a field"), (1, "not a field"), (-1, "congruent to 3"),
                                    (2, "congruent to 2"), (-12, "not congruent to 2 or 3"),
                                    (25, "not squarefree"), (-16, "not congruent"),
                                    (72, "not squarefree")])
def test_non_fundamental_rejected_with_reason(d, word):
    assert word in fundamental_discriminant_error(d)
    with pytest.raises(ValueError, match="not a fundamental discriminant"):
        kronecker_symbol(d, 3)


def test_fundamental_discriminants_accepted():
    for d in FUNDAMENTAL:
        assert fundamental_discriminant_error(d) is None


def test_sigma1_examples():
    assert divisor_sigma1(1) == 1
    assert divisor_sigma1(4) == 7
    assert divisor_sigma1(12) == 28
    assert evaluate_multiplicative(SIGMA1, 6) == 12


def test_sigma1_matches_divisor_enumeration():
    table = SIGMA1.table(10**4)
    for n in range(1, 10**4 + 1):
        expected = sum(d for d in range(1, math.isqrt(n) + 1) if n % d == 0
                       for d in {d, n // d})
        assert table[n] == expected == divisor_sigma1(n)


def test_empty_product_is_one():
    f = MultiplicativeFunction(lambda p, k: 7 * p + k)
    assert f(1) == 1


def test_ideal_count_rule_at_inert_square():
    assert QuadraticField(-4).ideal_counts(9) == 1


def test_multiplicative_on_coprime_pairs():
    f = MultiplicativeFunction(lambda p, k: p + 2 * k)
    for m in range(1, 60):
        for n in range(1, 60):
            if math.gcd(m, n) == 1:
                assert f(m * n) == f(m) * f(n)


def test_table_agrees_with_pointwise_evaluation():
    f = MultiplicativeFunction(lambda p, k: (-1) ** k * (p - 1))
    t = multiplicative_table(f, 500)
    assert t[0] == 0 and t[1] == 1
    assert all(t[n] == f(n) for n in range(1, 501))


def test_overflow_reported():
    f = MultiplicativeFunction(lambda p, k: 10**12, name="huge")
    with pytest.raises(OverflowError, match="huge"):
        f.table(100)


def test_factorization_and_sieve_bound():
    assert factorize(360) == [(2, 3), (3, 2), (5, 1)]
    assert factorize(1) == []
    assert primes_up_to(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    assert euler_phi(24) == 8
    with pytest.raises(ValueError, match="sieve bound"):
        factorize(SIEVE_LIMIT + 1)


def test_memo_is_safe_under_threads():
    f = MultiplicativeFunction(lambda p, k: p**k + 1)
    results = {}

    def work(offset):
        results[offset] = [f(n) for n in range(1 + offset, 3000, 7)]

    threads = [threading.Thread(target=work, args=(i,)) for i in range(7)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for offset, vals in results.items():
        assert vals == [evaluate_multiplicative(f, n) for n in range(1 + offset, 3000, 7)]


@given(st.integers(1, 10**6), st.integers(1, 10**6))
def test_rationals_exact(a, b):
    g = positive_rational(a, b)
    assert g * (1 / g) == 1
    assert math.gcd(g.numerator, g.denominator) == 1


def test_positive_rational_rejects_nonpositive():
    with pytest.raises(ValueError):
        positive_rational(0, 3)


def test_residue_class():
    c = ResidueClass.of(-1, 6)
    assert c.residue == 5 and c.is_invertible() and c.contains(11)
    assert [x.residue for x in c.refine(12)] == [5, 11]
    assert not ResidueClass(6, 4).is_invertible()
    with pytest.raises(ValueError):
        ResidueClass(6, 6)
    with pytest.raises(ValueError):
        c.refine(8)
