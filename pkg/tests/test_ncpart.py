import pytest

import oracles as O
from freesemigroup.errors import DomainError
from freesemigroup.ncpart import block_types, kreweras, nc_partitions


@pytest.mark.parametrize("n", range(1, 9))
def test_counts_are_catalan(n):
    assert len(nc_partitions(n)) == O.CATALAN[n]


def test_small_counts():
    assert len(nc_partitions(3)) == 5
    assert len(nc_partitions(6)) == 132


def _rotate(partition, n, k):
    return frozenset(frozenset((x + k) % n for x in block) for block in partition)


def _canon(partition):
    return frozenset(frozenset(b) for b in partition)


def test_kreweras_twice_is_rotation():
    n = 4
    for p in nc_partitions(n):
        twice = _canon(kreweras(kreweras(p, n), n))
        assert twice in {_rotate(_canon(p), n, k) for k in (1, n - 1)}


@pytest.mark.parametrize("n", range(1, 8))
def test_kreweras_block_count(n):
    # |pi| + |K(pi)| = n + 1
    for p in nc_partitions(n):
        assert len(p) + len(kreweras(p, n)) == n + 1


def test_kreweras_is_bijection():
    n = 6
    images = {_canon(kreweras(p, n)) for p in nc_partitions(n)}
    assert len(images) == O.CATALAN[n]


def test_block_types_cover_all_partitions():
    types = block_types(5)
    assert sum(types.values()) == O.CATALAN[5]
    assert all(sum(t) == 5 for t in types)
    # all singletons, one block, and the C(5,2) = 10 partitions with a single pair
    assert types[(1, 1, 1, 1, 1)] == 1 and types[(5,)] == 1 and types[(1, 1, 1, 2)] == 10


def test_partition_cap():
    with pytest.raises(DomainError):
        nc_partitions(13)
