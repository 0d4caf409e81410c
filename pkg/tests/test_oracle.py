from fractions import Fraction

import networkx as nx
import numpy as np
import pytest

from entwit.entropy import c_min_c_max, cut_entropy
from entwit.exceptions import ColoringError, GateExceededError, StateError, WitnessError
from entwit.graphs import (
    Graph,
    build_chain,
    build_complete,
    build_lattice,
    build_ring,
    build_star,
    chromatic_coloring,
    default_coloring,
    from_networkx,
    two_coloring,
)
from entwit.oracle import (
    EIGEN_CUTOFF,
    PauliString,
    StateVector,
    build_graph_state,
    entropy,
    expectation,
    fidelity,
    pauli_matrix,
    pinned_graph_state,
    projector_expectation,
    random_product_state,
    reduced_density,
    saturating_expectations,
    saturating_pins,
    saturating_states,
    schmidt_spectrum,
    stabilizer,
    stabilizer_group_element,
    verify_prop2,
    white_noise_state,
    witness_operator,
)
from entwit.partitions import Partition, block_bipartitions, parse_partition
from entwit.witness import WitnessKind, build_witness


def random_connected_graphs(count, seed, n_min=3, n_max=8):
    rng = np.random.default_rng(seed)
    graphs = []
    while len(graphs) < count:
        n = int(rng.integers(n_min, n_max + 1))
        g = from_networkx(nx.gnp_random_graph(n, float(rng.uniform(0.3, 0.7)), seed=int(rng.integers(2**31))))
        if g.is_connected():
            graphs.append(g)
    return graphs


def random_partition(n, rng):
    m = int(rng.integers(2, n + 1))
    labels = list(range(m)) + [int(x) for x in rng.integers(0, m, size=n - m)]
    rng.shuffle(labels)
    return Partition.from_labels(labels)


def check_cuts(g, partitions):
    state = build_graph_state(g)
    for p in partitions:
        for cut in block_bipartitions(p):
            rank = cut_entropy(g, cut.qubits).value
            assert abs(entropy(reduced_density(state, cut.qubits)) - rank) < 1e-8
            spectrum = schmidt_spectrum(state, cut.qubits)
            nonzero = spectrum[spectrum > EIGEN_CUTOFF]
            assert len(nonzero) == 2**rank
            assert np.allclose(nonzero, 2.0**-rank, atol=1e-9)


def test_two_qubit_graph_state():
    state = build_graph_state(build_chain(2))
    assert np.allclose(state.amplitudes, np.array([1, 1, 1, -1]) / 2)


def test_stabilizers_hold():
    g = build_lattice(2, 3)
    state = build_graph_state(g)
    for i in range(g.n):
        assert expectation(state, stabilizer(g, i)) == pytest.approx(1)
    assert expectation(state, PauliString("ZIIIII")) == pytest.approx(0)


def test_pauli_products():
    g = build_chain(2)
    assert str(stabilizer(g, 0)) == "+XZ"
    product = stabilizer(g, 0) * stabilizer(g, 1)
    assert product == PauliString("YY")
    assert stabilizer_group_element(g, [1, 1]) == product
    assert PauliString("ZZ") * PauliString("XX") == PauliString("YY", -1)
    with pytest.raises(StateError):
        PauliString("X") * PauliString("Y")
    with pytest.raises(StateError):
        PauliString("XQ")


def test_from_masks():
    assert PauliString.from_masks(3, 0b011, 0b110).letters == "XYZ"


def test_group_elements_stabilize():
    g = build_ring(5)
    state = build_graph_state(g)
    rng = np.random.default_rng(3)
    for _ in range(10):
        element = stabilizer_group_element(g, rng.integers(0, 2, size=5).tolist())
        assert expectation(state, element) == pytest.approx(1)


def test_pauli_matrix():
    y = pauli_matrix(PauliString("Y"))
    assert np.allclose(y, np.array([[0, -1j], [1j, 0]]))
    zx = pauli_matrix(PauliString("ZX"))
    assert np.allclose(zx, np.kron([[1, 0], [0, -1]], [[0, 1], [1, 0]]))
    with pytest.raises(GateExceededError):
        pauli_matrix(PauliString("X" * 11))


def test_state_checks():
    with pytest.raises(StateError, match="normalized"):
        StateVector(1, np.array([1, 1], dtype=complex))
    with pytest.raises(StateError):
        StateVector(2, np.array([1, 0], dtype=complex))
    with pytest.raises(GateExceededError):
        build_graph_state(build_chain(15))
    with pytest.raises(StateError):
        expectation(build_graph_state(build_chain(2)), PauliString("XXX"))


def test_fidelity_and_white_noise():
    g = build_chain(4)
    assert fidelity(build_graph_state(g), g) == pytest.approx(1)
    assert fidelity(white_noise_state(g, 0.4), g) == pytest.approx(0.6 + 0.4 / 16)


def test_projector_expectation_methods_agree():
    g = build_chain(5)
    coloring = two_coloring(g)
    rho = white_noise_state(g, 0.3)
    for cls in coloring.classes:
        expected = 1 - 0.3 * (1 - 2.0 ** -len(cls))
        assert projector_expectation(rho, g, cls) == pytest.approx(expected)
        assert projector_expectation(rho, g, cls, method="matrix") == pytest.approx(expected)


def test_projector_needs_independent_class():
    g = build_chain(3)
    with pytest.raises(ColoringError):
        projector_expectation(build_graph_state(g), g, [0, 1])


@pytest.mark.parametrize(
    "graph",
    [build_chain(6), build_ring(5), build_lattice(2, 3), build_star(5), build_complete(4), build_ring(7)],
)
def test_projector_inequality(graph):
    coloring = default_coloring(graph)
    assert verify_prop2(graph, coloring).passed


def test_projector_inequality_ring5_three_colors():
    g = build_ring(5)
    result = verify_prop2(g, chromatic_coloring(g, 8))
    assert result.passed
    assert result.min_eigenvalue == pytest.approx(0, abs=1e-9)


def test_entropy_matches_rank_examples():
    g = build_chain(6)
    check_cuts(g, [parse_partition(6, "0,1,1,2,2,2"), Partition.from_labels(range(6))])


def test_entropy_matches_rank_random_graphs():
    rng = np.random.default_rng(11)
    for g in random_connected_graphs(25, seed=5):
        check_cuts(g, [random_partition(g.n, rng) for _ in range(4)])


@pytest.mark.slow
def test_entropy_matches_rank_sweep():
    rng = np.random.default_rng(12)
    for g in random_connected_graphs(200, seed=6):
        check_cuts(g, [random_partition(g.n, rng) for _ in range(20)])


@pytest.mark.slow
def test_projector_inequality_sweep():
    for g in random_connected_graphs(200, seed=7):
        assert verify_prop2(g, chromatic_coloring(g, 8)).passed


def test_pinned_state_expectations():
    g = build_chain(6)
    coloring = two_coloring(g)
    pins = [0, 3]
    state = pinned_graph_state(g, pins)
    exact = saturating_expectations(coloring, pins)
    assert exact == (Fraction(1, 2), Fraction(1, 2))
    for cls, value in zip(coloring.classes, exact):
        assert projector_expectation(state, g, cls) == pytest.approx(float(value))


def saturation_value(g, witness, which, m=None):
    state = saturating_states(g, witness.coloring, which, m)
    total = sum(projector_expectation(state, g, cls) for cls in witness.coloring.classes)
    return float(witness.constant) - total


def test_bisep_state_saturates_gme_witness():
    for g in (build_chain(6), build_star(5), build_lattice(2, 3)):
        w = build_witness(g, two_coloring(g), WitnessKind.GME)
        assert saturation_value(g, w, "bisep") == pytest.approx(0, abs=1e-9)


def test_fullsep_state_saturates_singleton_witness():
    g = build_chain(7)
    w = build_witness(g, two_coloring(g), WitnessKind.FULLY_SEPARABLE, Partition.from_labels(range(7)))
    assert w.bound == Fraction(1, 8)
    assert saturation_value(g, w, "fullsep") == pytest.approx(0, abs=1e-9)


def test_chain_msep_state_saturates():
    g = build_chain(8)
    coloring = two_coloring(g)
    for m in range(2, 9):
        w = build_witness(g, coloring, WitnessKind.M_SEPARABLE, m)
        assert saturation_value(g, w, "msep_chain", m) == pytest.approx(0, abs=1e-9)


def test_lattice_msep_state_saturates():
    g = build_lattice(3, 4)
    coloring = two_coloring(g)
    assert saturating_pins(g, coloring, "msep_lattice5") == frozenset({2, 5, 8})
    w = build_witness(g, coloring, WitnessKind.M_SEPARABLE, 5)
    assert saturation_value(g, w, "msep_lattice5") == pytest.approx(0, abs=1e-9)


def test_saturating_pins_errors():
    g = build_ring(5)
    coloring = chromatic_coloring(g, 8)
    with pytest.raises(WitnessError):
        saturating_pins(g, coloring, "msep_chain", 3)
    with pytest.raises(WitnessError):
        saturating_pins(g, coloring, "msep_lattice5")
    with pytest.raises(WitnessError, match="unknown"):
        saturating_pins(g, coloring, "nothing")


def test_witness_operator():
    g = build_chain(4)
    coloring = two_coloring(g)
    w = build_witness(g, coloring, WitnessKind.GME)
    operator = witness_operator(w.constant, g, coloring)
    state = build_graph_state(g).amplitudes
    assert np.vdot(state, operator @ state).real == pytest.approx(-0.5)
    assert np.allclose(operator, operator.conj().T)


def test_product_states_respect_partition_bounds():
    g = build_chain(6)
    coloring = two_coloring(g)
    p = parse_partition(6, "0,1,1,2,2,2")
    w = build_witness(g, coloring, WitnessKind.FULLY_SEPARABLE, p)
    rng = np.random.default_rng(2)
    for _ in range(20):
        state = random_product_state(p, rng)
        assert fidelity(state, g) <= float(w.bound) + 1e-9
        total = sum(projector_expectation(state, g, cls) for cls in coloring.classes)
        assert float(w.constant) - total >= -1e-9


def test_random_product_state_factorizes():
    p = parse_partition(4, "0,1,0,1")
    state = random_product_state(p, np.random.default_rng(0))
    spectrum = schmidt_spectrum(state, [0, 2])
    assert len(spectrum[spectrum > EIGEN_CUTOFF]) == 1


def test_state_json():
    data = build_graph_state(build_chain(2)).to_json()
    assert data["n"] == 2
    assert data["real"] == pytest.approx([0.5, 0.5, 0.5, -0.5])


def test_graph_with_isolated_vertex_has_product_state():
    g = Graph(2, (0, 0))
    assert len(schmidt_spectrum(build_graph_state(g), [0])) == 2
    assert schmidt_spectrum(build_graph_state(g), [0])[1] == pytest.approx(0)


def test_separable_states_respect_cut_bounds_random_graphs():
    rng = np.random.default_rng(11)
    for g in random_connected_graphs(25, seed=5):
        p = random_partition(g.n, rng)
        report = c_min_c_max(g, p)
        for _ in range(5):
            assert fidelity(random_product_state(p, rng), g) <= float(report.c_min.value) + 1e-9
        for cut in block_bipartitions(p):
            halves = Partition.from_blocks(g.n, [cut.qubits, set(range(g.n)) - cut.qubits])
            for _ in range(3):
                assert fidelity(random_product_state(halves, rng), g) <= float(report.c_max.value) + 1e-9


def test_star_biseparable_state_reaches_bound():
    g = build_star(5)
    report = c_min_c_max(g, Partition.from_labels(range(5)))
    assert report.c_max.value == Fraction(1, 2)
    center_pinned = pinned_graph_state(g, [0])
    assert fidelity(center_pinned, g) == pytest.approx(0.5)
    assert schmidt_spectrum(center_pinned, [0])[1] == pytest.approx(0)
