import pytest
from hypothesis import given, strategies as st

from adhoc_mimo import partitions as P
from adhoc_mimo.partitions import (
    MultiplicityProfile,
    Partition,
    enumerate_partitions,
    multiplicity_profile,
    partition_count,
    partitions_with_length,
)


def dp_partition_counts(n_max):
    # coefficients of prod_{m>=1} 1/(1 - x^m)
    counts = [1] + [0] * n_max
    for m in range(1, n_max + 1):
        for k in range(m, n_max + 1):
            counts[k] += counts[k - m]
    return counts


def dp_largest_part(k, ell):
    # partitions of k whose largest part is exactly ell
    table = {}

    def at_most(n, m):
        if n == 0:
            return 1
        if m == 0:
            return 0
        if (n, m) not in table:
            table[n, m] = at_most(n, m - 1) + (at_most(n - m, m) if n >= m else 0)
        return table[n, m]

    return at_most(k - ell, ell) if k >= ell else 0


def test_partitions_of_four_in_listed_order():
    got = [p.summands for p in enumerate_partitions(4)]
    assert got == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]


def test_h_and_g_accessors():
    assert P.summand(2, 3, 4) == 2
    assert P.summand(2, 4, 4) == 1
    assert P.num_summands(3, 4) == 2
    assert partition_count(4) == 5
    assert P.multiplicity(1, 3, 4) == 2
    assert P.multiplicity(1, 5, 4) == 4
    assert P.num_distinct(3, 4) == 1


def test_small_cases():
    assert enumerate_partitions(0) == [Partition(())]
    assert enumerate_partitions(1) == [Partition((1,))]
    assert partition_count(0) == 1
    assert partition_count(10) == 42


def test_multiplicity_profiles():
    assert multiplicity_profile(Partition((2, 2))).entries == ((2, 2),)
    assert multiplicity_profile(Partition((1, 1, 1, 1))).entries == ((1, 4),)
    assert multiplicity_profile(Partition(())).entries == ()
    assert multiplicity_profile(Partition((3, 1, 1))).entries == ((3, 1), (1, 2))


def test_partitions_with_length():
    assert [p.summands for p in partitions_with_length(4, 2)] == [(3, 1), (2, 2)]
    assert partitions_with_length(3, 5) == []
    for p in range(1, 12):
        assert [q.summands for q in partitions_with_length(p, 1)] == [(p,)]


def test_counts_match_generating_function():
    oracle = dp_partition_counts(20)
    assert [partition_count(k) for k in range(21)] == oracle


@pytest.mark.parametrize("k", range(0, 21))
def test_length_counts_match_conjugate_largest_part(k):
    for ell in range(1, k + 2):
        assert len(partitions_with_length(k, ell)) == dp_largest_part(k, ell)


@given(st.integers(0, 18))
def test_profile_round_trip_and_sums(k):
    parts = enumerate_partitions(k)
    assert len(set(parts)) == len(parts)
    for p in parts:
        prof = multiplicity_profile(p)
        assert prof.expand() == p
        assert prof.total == k == p.total
        sums = [s for s, _ in prof.entries]
        assert sums == sorted(set(sums), reverse=True)


@given(st.integers(0, 18))
def test_order_is_descending_lexicographic_and_stable(k):
    seqs = [p.summands for p in enumerate_partitions(k)]
    assert seqs == sorted(seqs, reverse=True)
    assert seqs == [p.summands for p in enumerate_partitions(k)]


def test_invalid_inputs():
    with pytest.raises(ValueError):
        enumerate_partitions(-1)
    with pytest.raises(ValueError):
        enumerate_partitions(65)
    with pytest.raises(ValueError):
        Partition((1, 2))
    with pytest.raises(ValueError):
        Partition((0,))
    with pytest.raises(ValueError):
        partitions_with_length(3, 0)
    assert MultiplicityProfile(((3, 1), (1, 2))).expand() == Partition((3, 1, 1))
