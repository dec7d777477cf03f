"""Prime splitting, ideal enumeration, and norm-power sums."""
import math

import numpy as np
import pytest

from satolab.number_field import (
    FieldSpec,
    LevelSpec,
    PrimeIdeal,
    enumerate_prime_ideals,
    higher_power_sum,
    is_prime,
    kronecker_symbol,
    mertens_sum,
    pi_L,
    primes_up_to,
    split_prime,
)

Q5 = FieldSpec.real_quadratic(5)
QQ = FieldSpec.rationals()

PRIMES_BELOW_100 = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
                    53, 59, 61, 67, 71, 73, 79, 83, 89, 97]


def kronecker_oracle(disc: int, p: int) -> int:
    # Brute force: count square roots of disc mod p (odd p), minus one.
    if p == 2:
        if disc % 2 == 0:
            return 0
        return 1 if disc % 8 in (1, 7) else -1
    roots = sum(1 for t in range(p) if (t * t - disc) % p == 0)
    return roots - 1


def test_is_prime_against_sieve():
    flags = np.zeros(2000, dtype=bool)
    flags[primes_up_to(1999)] = True
    for n in range(2000):
        assert is_prime(n) == bool(flags[n])
    assert is_prime(2**61 - 1)
    assert not is_prime(2**61 + 1)


def test_primes_up_to_counts():
    assert primes_up_to(10).tolist() == [2, 3, 5, 7]
    assert len(primes_up_to(10**4)) == 1229
    assert len(primes_up_to(10**6)) == 78498


def test_primes_up_to_crosses_block_boundary():
    n = (1 << 20) + 5000
    ps = primes_up_to(n)
    assert np.all(ps[1:] > ps[:-1])
    tail = [int(p) for p in ps if p > n - 100]
    for p in tail:
        assert is_prime(p)


def test_kronecker_matches_oracle():
    for disc in [5, 8, 12, 13, 17]:
        for p in PRIMES_BELOW_100:
            assert kronecker_symbol(disc, p) == kronecker_oracle(disc, p)


def test_field_spec_validation():
    assert Q5.discriminant == 5
    assert FieldSpec.real_quadratic(2).discriminant == 8
    assert FieldSpec.real_quadratic(3).discriminant == 12
    with pytest.raises(ValueError):
        FieldSpec.real_quadratic(12)  # 4 | 12
    with pytest.raises(ValueError):
        FieldSpec.real_quadratic(1)
    with pytest.raises(ValueError):
        FieldSpec.of_degree(3, 7)
    assert FieldSpec.from_name("sqrt5") == Q5
    assert FieldSpec.from_name("rationals") == QQ


def test_split_prime_examples():
    eleven = split_prime(Q5, 11)
    assert [i.norm for i in eleven] == [11, 11]
    assert [i.split_type for i in eleven] == ["split", "split"]
    assert [i.label for i in eleven] == [0, 1]

    five = split_prime(Q5, 5)
    assert len(five) == 1 and five[0].split_type == "ramified" and five[0].norm == 5

    two = split_prime(Q5, 2)
    assert len(two) == 1 and two[0].split_type == "inert" and two[0].norm == 4
    # x^2 - x - 1 has no root mod 2, confirming inertness independently.
    assert all((t * t - t - 1) % 2 != 0 for t in range(2))

    with pytest.raises(ValueError):
        split_prime(Q5, 15)


def test_split_prime_matches_symbol_oracle():
    for p in PRIMES_BELOW_100:
        ideals = split_prime(Q5, p)
        sym = kronecker_oracle(5, p)
        if sym == 1:
            assert len(ideals) == 2 and all(i.norm == p for i in ideals)
        elif sym == -1:
            assert len(ideals) == 1 and ideals[0].norm == p * p
        else:
            assert len(ideals) == 1 and ideals[0].norm == p


def test_enumerate_rationals_x10():
    ideals = enumerate_prime_ideals(QQ, 10)
    assert [i.norm for i in ideals] == [2, 3, 5, 7]
    assert all(i.split_type == "rational" for i in ideals)


def test_enumerate_quadratic_x10_via_oracle():
    ideals = enumerate_prime_ideals(Q5, 10)
    # Independent count from the splitting oracle.
    expected = 0
    norms = []
    for p in [2, 3, 5, 7]:
        sym = kronecker_oracle(5, p)
        if sym == 1:
            expected += 2
            norms += [p, p]
        elif sym == 0:
            expected += 1
            norms += [p]
        elif p * p <= 10:
            expected += 1
            norms += [p * p]
    assert len(ideals) == expected
    assert sorted(i.norm for i in ideals) == sorted(norms)


def test_enumerate_sorted_and_inert_cutoff():
    ideals = enumerate_prime_ideals(Q5, 120)
    keys = [(i.norm, i.p, i.label) for i in ideals]
    assert keys == sorted(keys)
    for i in ideals:
        if i.split_type == "inert":
            assert i.p <= math.isqrt(120)
        assert i.norm == i.p**i.f


def test_level_exclusion_removes_one():
    level = LevelSpec.above_primes(Q5, [5])
    assert len(level.excluded) == 1
    full = enumerate_prime_ideals(Q5, 100)
    pruned = enumerate_prime_ideals(Q5, 100, level)
    assert len(full) - len(pruned) == 1
    assert all(i.norm != 5 for i in pruned)


def test_level_spec_rejects_duplicates():
    ideal = split_prime(Q5, 5)[0]
    with pytest.raises(ValueError):
        LevelSpec(excluded=(ideal, ideal))


def tau(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if n % k == 0)


def test_norm_multiplicity_bound():
    ideals = enumerate_prime_ideals(Q5, 300)
    counts = {}
    for i in ideals:
        counts[i.norm] = counts.get(i.norm, 0) + 1
    for norm, count in counts.items():
        assert count <= tau(norm) ** (Q5.degree - 1)
    for i in enumerate_prime_ideals(QQ, 300):
        assert 1 <= tau(i.norm) ** (QQ.degree - 1)


def test_pi_l_consistency_split_counts():
    x = 10**4
    split = ramified = inert_small = 0
    for p in primes_up_to(x):
        sym = kronecker_symbol(5, int(p))
        if sym == 1:
            split += 1
        elif sym == 0:
            ramified += 1
        elif p * p <= x:
            inert_small += 1
    assert pi_L(Q5, x) == 2 * split + ramified + inert_small


def test_enumeration_deterministic():
    a = enumerate_prime_ideals(Q5, 500)
    b = enumerate_prime_ideals(Q5, 500)
    assert a == b


def test_mertens_rationals_x100():
    direct = math.fsum(1.0 / p for p in PRIMES_BELOW_100)
    got = mertens_sum(QQ, 100)
    assert got == pytest.approx(direct, abs=1e-10)
    assert got == pytest.approx(1.80281, abs=1e-5)


def test_mertens_minus_loglog_stabilizes():
    vals = [mertens_sum(QQ, x) - math.log(math.log(x)) for x in [10**4, 10**5, 10**6]]
    assert max(vals) - min(vals) <= 0.05


def test_higher_power_sum_bounded():
    lo = higher_power_sum(QQ, 10**4)
    hi = higher_power_sum(QQ, 10**6)
    assert hi <= lo + 0.01
    assert hi >= lo


def test_sum_preconditions():
    with pytest.raises(ValueError):
        mertens_sum(QQ, 10)
    with pytest.raises(ValueError):
        higher_power_sum(QQ, 10)
    with pytest.raises(ValueError):
        enumerate_prime_ideals(QQ, 1.5)


def test_prime_ideal_ordering_key():
    a = PrimeIdeal(norm=11, p=11, label=0, f=1, split_type="split")
    b = PrimeIdeal(norm=11, p=11, label=1, f=1, split_type="split")
    c = PrimeIdeal(norm=9, p=3, label=0, f=2, split_type="inert")
    assert sorted([b, a, c]) == [c, a, b]
