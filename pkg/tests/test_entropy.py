from fractions import Fraction

import pytest

from entwit.entropy import (
    EntropyCache,
    boundary_count_lower_bound,
    c_m_analytic,
    c_m_exhaustive,
    c_min_c_max,
    cut_entropies,
    cut_entropy,
    dyadic,
    gamma,
    max_cut_entropy,
)
from entwit.exceptions import BoundUnavailableError, GateExceededError, GraphError, PartitionError
from entwit.gf2 import mask_of
from entwit.graphs import build_chain, build_complete, build_lattice, build_ring, build_star, from_edge_list
from entwit.partitions import chain_tail_partition, lattice_corner_partition, parse_partition

LATTICE_5X5 = "0,0,0,2,2,0,0,0,2,2,1,1,1,2,2,1,1,1,2,2,1,1,1,2,2"


def test_cut_entropy_values():
    assert cut_entropy(build_chain(6), [0, 1, 2]).value == 1
    assert cut_entropy(build_chain(6), [1, 2]).value == 2
    assert cut_entropy(build_star(5), [1, 2]).value == 1
    assert cut_entropy(build_complete(4), [0, 1]).value == 1
    assert cut_entropy(build_ring(5), [0, 1]).value == 2
    assert cut_entropy(build_chain(6), [1, 2]).bound == Fraction(1, 4)


def test_cut_entropy_is_symmetric():
    g = build_lattice(3, 3)
    a = [0, 1, 4]
    assert cut_entropy(g, a).value == cut_entropy(g, set(range(9)) - set(a)).value


def test_trivial_cut():
    with pytest.raises(GraphError):
        cut_entropy(build_chain(3), [0, 1, 2])


def test_entropy_cache_stores_both_sides():
    g = build_chain(5)
    cache = EntropyCache(g)
    assert cache(mask_of([0, 1])) == 1
    assert cache._values[mask_of([2, 3, 4])] == 1


def test_dyadic():
    assert dyadic(0) == 1
    assert dyadic(5) == Fraction(1, 32)


def test_chain6_tripartition():
    g = build_chain(6)
    p = parse_partition(6, "0,1,1,2,2,2")
    assert [c.value for c in cut_entropies(g, p)] == [1, 1, 2]
    report = c_min_c_max(g, p)
    assert report.c_min.value == Fraction(1, 4)
    assert report.c_max.value == Fraction(1, 2)
    assert report.c_min.cuts == (frozenset({0, 3, 4, 5}),)
    assert len(report.c_max.cuts) == 2
    assert max_cut_entropy(g, p) == 2


def test_lattice5x5_tripartition():
    report = c_min_c_max(build_lattice(5, 5), parse_partition(25, LATTICE_5X5))
    assert report.c_min.value == Fraction(1, 32)
    assert report.c_max.value == Fraction(1, 16)


def test_ring5_tripartition():
    report = c_min_c_max(build_ring(5), parse_partition(5, "0,1,1,2,2"))
    assert report.c_min.value == Fraction(1, 4)
    assert report.c_max.value == Fraction(1, 2)


def test_report_json():
    data = c_min_c_max(build_chain(6), parse_partition(6, "0,1,1,2,2,2")).to_json()
    assert data["c_min"]["num"] == 1
    assert data["c_min"]["den"] == 4
    assert data["c_max"]["co_achievers"] == [[0, 1, 2]]
    assert "c_m" not in data


def test_bounds_need_connected_graph():
    g = from_edge_list(4, [(0, 1), (2, 3)])
    with pytest.raises(GraphError, match="disconnected"):
        c_min_c_max(g, parse_partition(4, "0,0,1,1"))


def test_bounds_need_two_blocks():
    with pytest.raises(PartitionError):
        c_min_c_max(build_chain(3), parse_partition(3, "0,0,0"))


def test_gamma():
    assert [gamma(m) for m in range(1, 9)] == [0, 1, 2, 2, 3, 3, 3, 4]
    for m in range(2, 40):
        d = gamma(m)
        assert d * (d + 1) // 2 >= m - 1 > (d - 1) * d // 2


def test_analytic_chain():
    report = c_m_analytic(("chain", 8), 5)
    assert report.c_m.value == Fraction(1, 4)
    assert report.tight is True
    assert report.c_m.partition == chain_tail_partition(8, 5)
    assert c_m_analytic("chain", 7).c_m.value == Fraction(1, 8)


def test_analytic_ghz():
    report = c_m_analytic(("ghz", 10), 6)
    assert report.c_m.value == Fraction(1, 2)
    assert report.family_tag == "ghz"


def test_analytic_lattice():
    report = c_m_analytic(("lattice", 5, 5), 5)
    assert report.c_m.entropy == 3
    assert report.tight is True
    assert report.c_m.partition == lattice_corner_partition(5, 5, 5)
    large = c_m_analytic(("lattice", 5, 5), 7)
    assert large.c_m.entropy == 3
    assert large.tight is None
    assert large.to_json()["tight"] == "unknown"


def test_analytic_lattice_needs_enough_qubits():
    with pytest.raises(BoundUnavailableError):
        c_m_analytic(("lattice", 3, 3), 5)


def test_analytic_lattice2x2_refused():
    with pytest.raises(BoundUnavailableError, match="2x2"):
        c_m_analytic(("lattice", 2, 2), 3)
    assert c_m_exhaustive(build_lattice(2, 2), 3).c_m.value == Fraction(1, 2)


def test_thin_lattice_is_a_chain():
    assert c_m_analytic(("lattice", 1, 8), 6).c_m.value == Fraction(1, 8)


def test_analytic_unknown_family():
    with pytest.raises(BoundUnavailableError):
        c_m_analytic(("ring", 5), 3)
    with pytest.raises(BoundUnavailableError):
        c_m_analytic(("chain", 4), 5)


@pytest.mark.parametrize("n", range(2, 9))
def test_exhaustive_chain_matches_closed_form(n):
    g = build_chain(n)
    for m in range(2, n + 1):
        assert c_m_exhaustive(g, m).c_m.value == Fraction(1, 2 ** (m // 2))


@pytest.mark.slow
@pytest.mark.parametrize("n", [9, 10])
def test_exhaustive_chain_matches_closed_form_large(n):
    g = build_chain(n)
    for m in range(2, n + 1):
        assert c_m_exhaustive(g, m).c_m.value == Fraction(1, 2 ** (m // 2))


@pytest.mark.parametrize("rows, cols, m", [(2, 3, 2), (2, 3, 3), (2, 3, 4), (3, 3, 2), (3, 3, 3), (3, 3, 4)])
def test_exhaustive_lattice_matches_gamma(rows, cols, m):
    g = build_lattice(rows, cols)
    report = c_m_exhaustive(g, m)
    assert report.c_m.entropy == gamma(m)
    corner = lattice_corner_partition(rows, cols, m)
    assert max_cut_entropy(g, corner) == gamma(m)


@pytest.mark.slow
@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_exhaustive_lattice3x4_matches_gamma(m):
    assert c_m_exhaustive(build_lattice(3, 4), m).c_m.entropy == gamma(m)


def test_exhaustive_report():
    report = c_m_exhaustive(build_chain(6), 3)
    assert report.m == 3
    assert report.partitions_scanned >= 1
    assert max_cut_entropy(build_chain(6), report.c_m.partition) == 1
    assert report.to_json()["tight"] == "unknown"


def test_exhaustive_progress_counts_every_partition():
    counted = []
    report = c_m_exhaustive(build_ring(7), 3, progress=counted.append)
    assert sum(counted) == report.partitions_scanned


def test_parallel_scan_matches_serial():
    g = build_ring(8)
    serial = c_m_exhaustive(g, 3)
    parallel = c_m_exhaustive(g, 3, threads=2)
    assert parallel.c_m.entropy == serial.c_m.entropy
    assert parallel.c_m.partition == serial.c_m.partition


def test_exhaustive_gate():
    with pytest.raises(GateExceededError):
        c_m_exhaustive(build_chain(15), 2)


def test_boundary_count_bounds_chain_entropy():
    g = build_chain(6)
    assert boundary_count_lower_bound(g, [0, 1, 2]) == 1
    assert boundary_count_lower_bound(g, [1, 3]) == 4
    for a in ([0, 2, 4], [1, 2], [0, 5]):
        assert cut_entropy(g, a).value <= boundary_count_lower_bound(g, a)
    with pytest.raises(GraphError):
        boundary_count_lower_bound(build_ring(5), [0])


@pytest.mark.parametrize("n", range(2, 13))
def test_chain_entropy_grows_with_boundaries(n):
    g = build_chain(n)
    for a_mask in range(1, (1 << n) - 1):
        a = [v for v in range(n) if (a_mask >> v) & 1]
        boundaries = boundary_count_lower_bound(g, a)
        # boundaries >= m - 1 forces S >= floor(m / 2); take the largest such m
        assert cut_entropy(g, a).value >= (boundaries + 1) // 2


def test_chain7_two_boundary_clusters():
    g = build_chain(7)
    a = [1, 4, 6]
    assert boundary_count_lower_bound(g, a) == 5
    assert cut_entropy(g, a).value == 3


@pytest.mark.parametrize(
    "g",
    [build_chain(7), build_ring(7), build_lattice(2, 3), build_star(6), build_complete(5)],
    ids=lambda g: g.label,
)
def test_c_m_non_increasing_in_m(g):
    values = [c_m_exhaustive(g, m).c_m.value for m in range(2, g.n + 1)]
    assert all(later <= earlier for earlier, later in zip(values, values[1:]))
