"""Exact dense simulation for small graphs.

Basis index convention: qubit ``q`` of an ``n``-qubit state is bit
``n - 1 - q`` of the basis index, so reshaping amplitudes to ``(2,) * n``
puts qubit ``q`` on axis ``q``.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Any, Dict, FrozenSet, Iterable, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from .config import DEFAULT_DENSE_GATE, DEFAULT_DENSITY_GATE
from .exceptions import ColoringError, GateExceededError, StateError, WitnessError
from .gf2 import bits_of, mask_of
from .graphs import Coloring, Graph, analytic_family
from .partitions import Partition

logger = logging.getLogger(__name__)

PSD_TOLERANCE = 1e-9
EIGEN_CUTOFF = 1e-12


@dataclass(frozen=True, eq=False)
class StateVector:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.amplitudes.shape != (2**self.n,):
            raise StateError(f"expected {2**self.n} amplitudes, got shape {self.amplitudes.shape}")
        norm = float(np.vdot(self.amplitudes, self.amplitudes).real)
        if abs(norm - 1) > 1e-10:
            raise StateError(f"state is not normalized: <psi|psi> = {norm}")

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.n, np.outer(self.amplitudes, self.amplitudes.conj()))

    def to_json(self) -> Dict[str, Any]:
        return {"n": self.n, "real": self.amplitudes.real.tolist(), "imag": self.amplitudes.imag.tolist()}


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    n: int
    matrix: np.ndarray

    def __post_init__(self):
        dim = 2**self.n
        if self.matrix.shape != (dim, dim):
            raise StateError(f"expected a {dim}x{dim} matrix, got shape {self.matrix.shape}")
        if not np.allclose(self.matrix, self.matrix.conj().T, atol=1e-10):
            raise StateError("density matrix is not Hermitian")
        if abs(np.trace(self.matrix).real - 1) > 1e-10:
            raise StateError("density matrix does not have unit trace")


State = Union[StateVector, DensityMatrix]

_PRODUCT = {
    ("X", "Y"): ("Z", 1),
    ("Y", "Z"): ("X", 1),
    ("Z", "X"): ("Y", 1),
    ("Y", "X"): ("Z", 3),
    ("Z", "Y"): ("X", 3),
    ("X", "Z"): ("Y", 3),
}


@dataclass(frozen=True)
class PauliString:
    letters: str
    sign: int = 1

    def __post_init__(self):
        if set(self.letters) - set("IXYZ"):
            raise StateError(f"invalid Pauli letters {self.letters!r}")
        if self.sign not in (1, -1):
            raise StateError(f"Pauli sign must be +1 or -1, got {self.sign}")

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls("I" * n)

    @classmethod
    def from_masks(cls, n: int, x_mask: int, z_mask: int, sign: int = 1) -> "PauliString":
        """Bit q of each mask is qubit q; X and Z together make Y"""
        letters = "".join("IXZY"[((x_mask >> q) & 1) | (((z_mask >> q) & 1) << 1)] for q in range(n))
        return cls(letters, sign)

    @property
    def n(self) -> int:
        return len(self.letters)

    @property
    def x_mask(self) -> int:
        return mask_of(q for q, c in enumerate(self.letters) if c in "XY")

    @property
    def z_mask(self) -> int:
        return mask_of(q for q, c in enumerate(self.letters) if c in "ZY")

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.n != other.n:
            raise StateError(f"cannot multiply Pauli strings on {self.n} and {other.n} qubits")
        phase = 0 if self.sign * other.sign == 1 else 2
        letters = []
        for a, b in zip(self.letters, other.letters):
            if a == "I":
                letters.append(b)
            elif b == "I":
                letters.append(a)
            elif a == b:
                letters.append("I")
            else:
                letter, exp = _PRODUCT[a, b]
                letters.append(letter)
                phase += exp
        if phase % 2:
            raise StateError("product of anticommuting Pauli strings is not Hermitian")
        return PauliString("".join(letters), 1 if phase % 4 == 0 else -1)

    def __str__(self) -> str:
        return ("+" if self.sign == 1 else "-") + self.letters


def stabilizer(g: Graph, i: int) -> PauliString:
    """X on i, Z on its neighbors"""
    return PauliString.from_masks(g.n, 1 << i, mask_of(g.neighbors(i)))


def stabilizer_group_element(g: Graph, p: Sequence[int]) -> PauliString:
    """Product of S_i**p_i in ascending i"""
    if len(p) != g.n:
        raise StateError(f"p-vector has length {len(p)}, graph has {g.n} vertices")
    out = PauliString.identity(g.n)
    for i, bit in enumerate(p):
        if bit & 1:
            out = out * stabilizer(g, i)
    return out


def _check_gate(n: int, gate: int, what: str) -> None:
    if n > gate:
        raise GateExceededError(f"{what} on {n} qubits exceeds the dense gate of {gate}", limit=gate, requested=n)


def _basis_mask(n: int, qubit_mask: int) -> int:
    return mask_of(n - 1 - q for q in bits_of(qubit_mask))


def _coefficients(n: int, x_mask: int, z_mask: int, sign: int) -> Tuple[np.ndarray, int]:
    """P|b> = coeff[b] |b ^ flip> for the Pauli with the given qubit masks"""
    idx = np.arange(2**n, dtype=np.int64)
    parity = np.zeros(2**n, dtype=np.int64)
    for pos in bits_of(_basis_mask(n, z_mask)):
        parity ^= (idx >> pos) & 1
    n_y = bin(x_mask & z_mask).count("1")
    coeff = sign * (1j**n_y) * (1 - 2 * parity)
    return coeff.astype(complex), _basis_mask(n, x_mask)


def _expectation_masks(state: State, x_mask: int, z_mask: int, sign: int = 1) -> float:
    coeff, flip = _coefficients(state.n, x_mask, z_mask, sign)
    idx = np.arange(2**state.n, dtype=np.int64)
    if isinstance(state, StateVector):
        psi = state.amplitudes
        value = np.sum(coeff * psi[idx ^ flip].conj() * psi)
    else:
        value = np.sum(coeff * state.matrix[idx, idx ^ flip])
    return float(value.real)


def expectation(state: State, pauli: PauliString) -> float:
    """Tr(rho P)"""
    if pauli.n != state.n:
        raise StateError(f"Pauli string on {pauli.n} qubits, state on {state.n}")
    return _expectation_masks(state, pauli.x_mask, pauli.z_mask, pauli.sign)


def pauli_matrix(pauli: PauliString, gate: int = DEFAULT_DENSITY_GATE) -> np.ndarray:
    _check_gate(pauli.n, gate, "a dense Pauli matrix")
    coeff, flip = _coefficients(pauli.n, pauli.x_mask, pauli.z_mask, pauli.sign)
    idx = np.arange(2**pauli.n, dtype=np.int64)
    out = np.zeros((2**pauli.n, 2**pauli.n), dtype=complex)
    out[idx ^ flip, idx] = coeff
    return out


def _check_class(g: Graph, cls: Iterable[int]) -> Tuple[int, ...]:
    members = tuple(sorted(set(cls)))
    m = mask_of(members)
    for v in members:
        if not 0 <= v < g.n:
            raise ColoringError(f"vertex {v} out of range")
        if g.rows[v] & m:
            raise ColoringError(f"class {list(members)} is not an independent set")
    return members


def projector_matrix(g: Graph, cls: Iterable[int], gate: int = DEFAULT_DENSITY_GATE) -> np.ndarray:
    """Dense product of (S_i + I)/2 over the class"""
    members = _check_class(g, cls)
    _check_gate(g.n, gate, "a dense projector")
    eye = np.eye(2**g.n, dtype=complex)
    return reduce(lambda acc, i: acc @ (pauli_matrix(stabilizer(g, i), gate) + eye) / 2, members, eye)


def projector_expectation(state: State, g: Graph, cls: Iterable[int], method: str = "subgroup") -> float:
    """<P_l> as the average of the 2**n_l stabilizer subgroup expectations, or from the dense projector"""
    if state.n != g.n:
        raise StateError(f"state on {state.n} qubits, graph has {g.n}")
    members = _check_class(g, cls)
    if method == "matrix":
        proj = projector_matrix(g, members)
        if isinstance(state, StateVector):
            return float(np.vdot(state.amplitudes, proj @ state.amplitudes).real)
        return float(np.trace(state.matrix @ proj).real)
    if method != "subgroup":
        raise ValueError(f"unknown method {method!r}")
    total = 0.0
    for subset in range(2 ** len(members)):
        x_mask = z_mask = 0
        for j, v in enumerate(members):
            if (subset >> j) & 1:
                x_mask |= 1 << v
                z_mask ^= g.rows[v]
        # independent class: X and Z supports are disjoint, so the product carries sign +1
        total += _expectation_masks(state, x_mask, z_mask)
    return total / 2 ** len(members)


def pinned_graph_state(g: Graph, pinned: Iterable[int] = (), gate: int = DEFAULT_DENSE_GATE) -> StateVector:
    """CZ on every edge applied to |+> on free qubits and |0> on pinned ones"""
    _check_gate(g.n, gate, "a graph state")
    n = g.n
    pinned = frozenset(pinned)
    idx = np.arange(2**n, dtype=np.int64)
    bits = (idx[:, None] >> (n - 1 - np.arange(n))) & 1
    parity = np.zeros(2**n, dtype=np.int64)
    for i, j in g.edges:
        parity ^= bits[:, i] & bits[:, j]
    amplitudes = (1 - 2 * parity).astype(complex)
    for q in pinned:
        amplitudes[bits[:, q] == 1] = 0
    amplitudes /= np.sqrt(2.0 ** (n - len(pinned)))
    return StateVector(n, amplitudes)


def build_graph_state(g: Graph, gate: int = DEFAULT_DENSE_GATE) -> StateVector:
    return pinned_graph_state(g, (), gate)


def _split(state: StateVector, a: Iterable[int]) -> np.ndarray:
    a_sorted = sorted(set(a))
    if not a_sorted or len(a_sorted) >= state.n or any(not 0 <= v < state.n for v in a_sorted):
        raise StateError(f"cut side must be a nonempty proper subset of 0..{state.n - 1}")
    rest = [q for q in range(state.n) if q not in set(a_sorted)]
    tensor = state.amplitudes.reshape((2,) * state.n)
    return np.transpose(tensor, a_sorted + rest).reshape(2 ** len(a_sorted), -1)


def reduced_density(state: StateVector, a: Iterable[int]) -> DensityMatrix:
    """Partial trace over the complement of ``a``; qubits of ``a`` keep ascending order"""
    block = _split(state, a)
    return DensityMatrix(int(np.log2(block.shape[0])), block @ block.conj().T)


def entropy(d: DensityMatrix) -> float:
    """von Neumann entropy in bits"""
    eigenvalues = scipy.linalg.eigvalsh(d.matrix)
    eigenvalues = eigenvalues[eigenvalues > EIGEN_CUTOFF]
    return float(-np.sum(eigenvalues * np.log2(eigenvalues)))


def schmidt_spectrum(state: StateVector, a: Iterable[int]) -> np.ndarray:
    """Eigenvalues of the reduced state on ``a``, descending"""
    singular = scipy.linalg.svdvals(_split(state, a))
    return np.sort(singular**2)[::-1]


def fidelity(state: State, g: Graph) -> float:
    """<G|rho|G>"""
    if state.n != g.n:
        raise StateError(f"state on {state.n} qubits, graph has {g.n}")
    target = build_graph_state(g).amplitudes
    if isinstance(state, StateVector):
        return float(abs(np.vdot(target, state.amplitudes)) ** 2)
    return float(np.vdot(target, state.matrix @ target).real)


def white_noise_state(g: Graph, p: float, gate: int = DEFAULT_DENSITY_GATE) -> DensityMatrix:
    """(1 - p)|G><G| + p I / 2**n"""
    if not 0 <= p <= 1:
        raise StateError(f"noise weight {p} outside [0, 1]")
    _check_gate(g.n, gate, "a density matrix")
    pure = build_graph_state(g).density().matrix
    return DensityMatrix(g.n, (1 - p) * pure + p * np.eye(2**g.n) / 2**g.n)


@dataclass(frozen=True)
class Prop2Check:
    min_eigenvalue: float

    @property
    def passed(self) -> bool:
        return self.min_eigenvalue >= -PSD_TOLERANCE


def verify_prop2(g: Graph, coloring: Coloring, gate: int = DEFAULT_DENSITY_GATE) -> Prop2Check:
    """Smallest eigenvalue of |G><G| + (k - 1) I - sum_l P_l, which must be non-negative"""
    _check_gate(g.n, gate, "the projector inequality check")
    coloring.validate(g)
    operator = build_graph_state(g).density().matrix + (coloring.k - 1) * np.eye(2**g.n)
    for cls in coloring.classes:
        operator = operator - projector_matrix(g, cls, gate)
    lowest = scipy.linalg.eigvalsh(operator, subset_by_index=[0, 0])[0]
    logger.debug("projector inequality on %s: min eigenvalue %.3e", g.label, lowest)
    return Prop2Check(float(lowest))


def witness_operator(constant: Fraction, g: Graph, coloring: Coloring, gate: int = DEFAULT_DENSITY_GATE) -> np.ndarray:
    """Dense c I - sum_l P_l"""
    _check_gate(g.n, gate, "a dense witness")
    operator = float(constant) * np.eye(2**g.n, dtype=complex)
    for cls in coloring.classes:
        operator = operator - projector_matrix(g, cls, gate)
    return operator


SATURATING = ("bisep", "fullsep", "msep_chain", "msep_lattice5")


def saturating_pins(g: Graph, coloring: Coloring, which: str, m: Optional[int] = None) -> FrozenSet[int]:
    """Qubits pinned to |0> by the named witness-saturating construction"""
    coloring.validate(g)
    family = analytic_family(g)
    if which == "bisep":
        return frozenset([min(coloring.classes[0])])
    if which == "fullsep":
        return frozenset(range(g.n)) - coloring.classes[0]
    if which == "msep_chain":
        if family is None or family[0] != "chain":
            raise WitnessError(f"msep_chain needs a chain graph, got {g.label}")
        if m is None or not 2 <= m <= g.n:
            raise WitnessError(f"msep_chain needs 2 <= m <= {g.n}")
        return frozenset(range(1, m, 2))
    if which == "msep_lattice5":
        if family is None or family[0] != "lattice" or min(family[1], family[2]) < 3:
            raise WitnessError(f"msep_lattice5 needs a lattice with both sides >= 3, got {g.label}")
        cols = family[2]
        return frozenset([2, cols + 1, 2 * cols])
    raise WitnessError(f"unknown saturating construction {which!r}; expected one of {SATURATING}")


def saturating_expectations(coloring: Coloring, pins: Iterable[int]) -> Tuple[Fraction, ...]:
    """Exact <P_l> = 2**-|V_l & pins| on a graph state with pinned qubits"""
    pins = frozenset(pins)
    return tuple(Fraction(1, 2 ** len(cls & pins)) for cls in coloring.classes)


def saturating_states(
    g: Graph, coloring: Coloring, which: str, m: Optional[int] = None, gate: int = DEFAULT_DENSE_GATE
) -> StateVector:
    return pinned_graph_state(g, saturating_pins(g, coloring, which, m), gate)


def random_product_state(partition: Partition, rng: np.random.Generator) -> StateVector:
    """Tensor product of Haar-random pure states, one per block"""
    factors = []
    order = []
    for block in partition.blocks:
        dim = 2 ** len(block)
        vec = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        factors.append(vec / np.linalg.norm(vec))
        order.extend(sorted(block))
    tensor = reduce(np.kron, factors).reshape((2,) * partition.n)
    return StateVector(partition.n, np.transpose(tensor, np.argsort(order)).reshape(-1))
