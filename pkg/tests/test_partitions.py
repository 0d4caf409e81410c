import json
from math import comb, factorial

import pytest

from entwit.exceptions import GateExceededError, PartitionError
from entwit.partitions import (
    Partition,
    block_bipartitions,
    chain_tail_partition,
    check_gate,
    enumerate_m_partitions,
    lattice_corner_partition,
    parse_partition,
    restricted_growth_strings,
    rgs_prefixes,
    stirling2,
)

SUBSYSTEM_4X4 = "0,0,0,3,0,0,0,3,1,2,2,3,1,2,2,3"


def test_parse_labels():
    p = parse_partition(6, "0,1,1,2,2,2")
    assert p.blocks == (frozenset({0}), frozenset({1, 2}), frozenset({3, 4, 5}))
    assert p.m == 3
    assert p.to_text() == "0,1,1,2,2,2"


def test_labels_are_canonicalized():
    p = parse_partition(4, "b,b,a,c")
    assert p.blocks == (frozenset({0, 1}), frozenset({2}), frozenset({3}))
    assert p.labels == (0, 0, 1, 2)


def test_missing_qubit():
    with pytest.raises(PartitionError, match="qubit 3 is missing"):
        parse_partition(4, "0,1,1")


def test_too_many_labels():
    with pytest.raises(PartitionError):
        parse_partition(2, "0,1,1")


def test_empty_label():
    with pytest.raises(PartitionError):
        parse_partition(3, "0,,1")


def test_parse_json(tmp_path):
    assert parse_partition(3, '{"blocks": [[2], [0, 1]]}').blocks == (frozenset({0, 1}), frozenset({2}))
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"blocks": [[0], [1, 2]]}))
    assert parse_partition(3, str(path)).m == 2
    with pytest.raises(PartitionError, match="invalid partition JSON"):
        parse_partition(3, '{"parts": []}')


def test_constructor_validation():
    with pytest.raises(PartitionError, match="canonical"):
        Partition(3, (frozenset({2}), frozenset({0, 1})))
    with pytest.raises(PartitionError, match="two blocks"):
        Partition(3, (frozenset({0, 1}), frozenset({1, 2})))
    with pytest.raises(PartitionError, match="no block"):
        Partition.from_blocks(3, [[0], [1]])


def test_block_bipartitions_keep_block_zero_on_one_side():
    cuts = block_bipartitions(parse_partition(6, "0,1,1,2,2,2"))
    assert [sorted(c.a_side) for c in cuts] == [[0], [0, 1], [0, 2]]
    assert cuts[1].qubits == frozenset({0, 1, 2})


def test_bipartition_count():
    p = Partition.from_labels(range(5))
    assert len(block_bipartitions(p)) == 2**4 - 1
    with pytest.raises(PartitionError):
        block_bipartitions(Partition.from_labels([0, 0]))


def test_stirling2():
    assert stirling2(4, 2) == 7
    assert stirling2(5, 3) == 25
    assert stirling2(10, 5) == 42525
    assert stirling2(3, 4) == 0


BELL = [1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975]


@pytest.mark.parametrize("n", range(1, 11))
def test_stirling2_rows(n):
    for m in range(1, n + 1):
        inclusion_exclusion = sum((-1) ** j * comb(m, j) * (m - j) ** n for j in range(m + 1)) // factorial(m)
        assert stirling2(n, m) == inclusion_exclusion
        assert stirling2(n, m) == m * stirling2(n - 1, m) + stirling2(n - 1, m - 1)
    assert sum(stirling2(n, m) for m in range(n + 1)) == BELL[n]


@pytest.mark.parametrize("n, m", [(4, 2), (6, 3), (7, 4), (5, 5)])
def test_enumeration_matches_stirling(n, m):
    partitions = list(enumerate_m_partitions(n, m))
    assert len(partitions) == stirling2(n, m)
    assert len(set(partitions)) == len(partitions)
    assert all(p.m == m for p in partitions)


def test_enumeration_gate():
    with pytest.raises(GateExceededError) as info:
        next(enumerate_m_partitions(15, 2))
    assert info.value.limit == 14
    assert info.value.requested == 15
    check_gate(15, override=True)


def test_enumeration_range():
    with pytest.raises(PartitionError):
        next(enumerate_m_partitions(4, 5))


def test_prefix_chunks_cover_the_stream_in_order():
    full = list(restricted_growth_strings(7, 3))
    chunked = [s for prefix in rgs_prefixes(7, 3, 3) for s in restricted_growth_strings(7, 3, prefix)]
    assert chunked == full


def test_chain_tail_partition():
    p = chain_tail_partition(6, 3)
    assert p.blocks == (frozenset({0, 1, 2, 3}), frozenset({4}), frozenset({5}))
    assert p == Partition.from_labels(next(restricted_growth_strings(6, 3)))


def test_lattice_corner_partition():
    p = lattice_corner_partition(3, 4, 5)
    singletons = sorted(min(b) for b in p.blocks if len(b) == 1)
    assert singletons == [0, 1, 4, 5]
    assert p.m == 5
    with pytest.raises(PartitionError):
        lattice_corner_partition(3, 4, 6)


def test_restrict_subsystem():
    p = parse_partition(16, SUBSYSTEM_4X4)
    assert p.blocks[1] == frozenset({3, 7, 11, 15})
    sub, kept = p.restrict([0, 2, 3])
    assert kept == (0, 1, 2, 4, 5, 6, 8, 9, 10, 12, 13, 14)
    assert sub.blocks == (frozenset(range(6)), frozenset({6, 9}), frozenset({7, 8, 10, 11}))


def test_restrict_out_of_range():
    with pytest.raises(PartitionError):
        parse_partition(4, "0,0,1,1").restrict([0, 2])
