"""Shot-level simulation of the k local measurement settings.

Setting ``l`` measures X on color class ``V_l`` and Z everywhere else. A shot
is a row of outcome bits, ``0`` for eigenvalue +1 and ``1`` for -1. White
noise is applied at the mixture level: each shot comes from the maximally
mixed state with probability ``p`` and from the graph state otherwise.
"""

import base64
import logging
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import DEFAULT_DENSE_GATE, DEFAULT_RAW_CAP
from .exceptions import EstimateError, StateError
from .gf2 import BitMatrix, bits_of, mask_of, nullspace, row_reduce
from .graphs import Coloring, Graph
from .oracle import build_graph_state, stabilizer_group_element
from .witness import Estimate

logger = logging.getLogger(__name__)

Seed = Union[int, np.random.SeedSequence, np.random.Generator, None]

_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True)
class MeasurementSetting:
    x_set: FrozenSet[int]
    z_set: FrozenSet[int]

    def __post_init__(self):
        if self.x_set & self.z_set:
            raise EstimateError("a qubit cannot be measured in both X and Z")

    @classmethod
    def for_class(cls, n: int, color_class: Iterable[int]) -> "MeasurementSetting":
        x_set = frozenset(color_class)
        return cls(x_set, frozenset(range(n)) - x_set)

    @property
    def n(self) -> int:
        return len(self.x_set) + len(self.z_set)

    def validate(self, g: Graph) -> None:
        if self.x_set | self.z_set != frozenset(range(g.n)):
            raise EstimateError("setting does not cover every qubit")
        m = mask_of(self.x_set)
        if any(g.rows[v] & m for v in self.x_set):
            raise EstimateError("X-measured qubits must form an independent set")

    def label(self) -> str:
        return "".join("X" if q in self.x_set else "Z" for q in range(self.n))


def settings_for(coloring: Coloring) -> List[MeasurementSetting]:
    return [MeasurementSetting.for_class(coloring.n, cls) for cls in coloring.classes]


def _rng(seed: Seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _index_bits(indices: np.ndarray, n: int) -> np.ndarray:
    return ((indices[:, None] >> (n - 1 - np.arange(n))) & 1).astype(np.uint8)


def _sample_dense(g: Graph, setting: MeasurementSetting, shots: int, rng: np.random.Generator, gate: int) -> np.ndarray:
    """Born-rule sampling after rotating X-measured qubits with Hadamards"""
    tensor = build_graph_state(g, gate).amplitudes.reshape((2,) * g.n)
    for q in sorted(setting.x_set):
        tensor = np.moveaxis(np.tensordot(_HADAMARD, tensor, axes=([1], [q])), 0, q)
    probs = np.abs(tensor.reshape(-1)) ** 2
    probs /= probs.sum()
    return _index_bits(rng.choice(probs.size, size=shots, p=probs), g.n)


@dataclass(frozen=True)
class OutcomeConstraints:
    """Affine GF(2) system every outcome of a setting satisfies on the pure graph state.

    Rows are in reduced echelon form; outcomes are uniform over its solutions.
    """

    n: int
    rows: Tuple[int, ...]
    rhs: Tuple[int, ...]
    pivots: Tuple[int, ...]

    @property
    def free(self) -> Tuple[int, ...]:
        pivot_set = set(self.pivots)
        return tuple(q for q in range(self.n) if q not in pivot_set)


def outcome_constraints(g: Graph, setting: MeasurementSetting) -> OutcomeConstraints:
    """Stabilizer elements diagonal in the measured basis, reduced to a solvable system.

    Generator i is X_i Z^{N_i}, i.e. x-part e_i and z-part row i. An element
    K_p is measurable when it has no Z on X-measured qubits and no X on
    Z-measured ones.
    """
    setting.validate(g)
    compat = [g.rows[q] if q in setting.x_set else 1 << q for q in range(g.n)]
    basis = nullspace(BitMatrix(g.n, g.n, tuple(compat)))
    supports = []
    signs = []
    for p_mask in basis.rows:
        element = stabilizer_group_element(g, [(p_mask >> i) & 1 for i in range(g.n)])
        supports.append(element.x_mask | element.z_mask)
        signs.append(1 if element.sign == -1 else 0)
    augmented = BitMatrix(len(supports), g.n + 1, tuple(s | (b << g.n) for s, b in zip(supports, signs)))
    reduced = row_reduce(augmented)
    if reduced.pivots and reduced.pivots[-1] == g.n:
        raise StateError("inconsistent stabilizer constraints")
    rank = reduced.rank
    body = (1 << g.n) - 1
    rows = tuple(r & body for r in reduced.rref.rows[:rank])
    rhs = tuple((r >> g.n) & 1 for r in reduced.rref.rows[:rank])
    return OutcomeConstraints(g.n, rows, rhs, reduced.pivots)


def _sample_tableau(g: Graph, setting: MeasurementSetting, shots: int, rng: np.random.Generator) -> np.ndarray:
    system = outcome_constraints(g, setting)
    out = np.zeros((shots, g.n), dtype=np.uint8)
    free = list(system.free)
    if free:
        out[:, free] = rng.integers(0, 2, size=(shots, len(free)), dtype=np.uint8)
    for row, bit, pivot in zip(system.rows, system.rhs, system.pivots):
        others = bits_of(row & ~(1 << pivot))
        parity = out[:, others].sum(axis=1, dtype=np.int64) & 1 if others else np.zeros(shots, dtype=np.int64)
        out[:, pivot] = (parity ^ bit).astype(np.uint8)
    return out


def sample_setting(
    g: Graph,
    p: float,
    setting: MeasurementSetting,
    shots: int,
    seed: Seed = None,
    dense_gate: int = DEFAULT_DENSE_GATE,
) -> np.ndarray:
    """``shots`` x ``n`` outcome bits of one setting on (1 - p)|G><G| + p I / 2**n"""
    if shots < 1:
        raise EstimateError(f"shots must be positive, got {shots}")
    if not 0 <= p <= 1:
        raise EstimateError(f"noise weight {p} outside [0, 1]")
    rng = _rng(seed)
    noisy = rng.random(shots) < p
    n_pure = int(shots - noisy.sum())
    out = np.empty((shots, g.n), dtype=np.uint8)
    if n_pure:
        if g.n <= dense_gate:
            pure = _sample_dense(g, setting, n_pure, rng, dense_gate)
        else:
            pure = _sample_tableau(g, setting, n_pure, rng)
        out[~noisy] = pure
    if n_pure < shots:
        out[noisy] = rng.integers(0, 2, size=(shots - n_pure, g.n), dtype=np.uint8)
    return out


def projector_hits(
    outcomes: np.ndarray,
    g: Graph,
    color_class: Iterable[int],
    restrict_to: Optional[Iterable[int]] = None,
    correct_byproducts: bool = False,
) -> np.ndarray:
    """Per-shot value of prod_i (1 + s_i)/2 with s_i = x_i prod_{j in N_i} z_j, as 0/1.

    With ``restrict_to``, both the class and the neighborhoods are cut down to
    those qubits, which evaluates the projector of the induced subgraph on the
    marginal outcomes. ``correct_byproducts`` keeps the Z outcomes of dropped
    neighbors instead, which undoes the Z byproducts of measuring them out.
    """
    outcomes = np.asarray(outcomes)
    if outcomes.ndim != 2 or outcomes.shape[1] != g.n:
        raise EstimateError(f"expected outcomes of shape (shots, {g.n}), got {outcomes.shape}")
    kept = mask_of(restrict_to) if restrict_to is not None else g.vertex_mask
    violated = np.zeros(outcomes.shape[0], dtype=bool)
    for i in sorted(set(color_class)):
        if not (kept >> i) & 1:
            continue
        cols = [i] + bits_of(g.rows[i] if correct_byproducts else g.rows[i] & kept)
        violated |= (outcomes[:, cols].sum(axis=1, dtype=np.int64) & 1).astype(bool)
    return (~violated).astype(np.uint8)


def _binomial_estimate(hits: int, shots: int) -> Estimate:
    mean = hits / shots
    return Estimate(mean, float(np.sqrt(mean * (1 - mean) / shots)), shots)


def estimate_projector(
    outcomes: np.ndarray,
    g: Graph,
    color_class: Iterable[int],
    setting: Optional[MeasurementSetting] = None,
    restrict_to: Optional[Iterable[int]] = None,
    correct_byproducts: bool = False,
) -> Estimate:
    members = frozenset(color_class)
    if setting is not None:
        kept = frozenset(restrict_to) if restrict_to is not None else frozenset(range(g.n))
        if not (members & kept) <= setting.x_set:
            raise EstimateError("outcomes come from a setting that does not measure this class in X")
    hits = projector_hits(outcomes, g, members, restrict_to, correct_byproducts)
    return _binomial_estimate(int(hits.sum()), len(hits))


@dataclass(frozen=True, eq=False)
class SettingRecord:
    setting: MeasurementSetting
    shots: int
    hits: int
    outcomes: Optional[np.ndarray]

    @property
    def truncated(self) -> bool:
        return self.outcomes is None

    @property
    def estimate(self) -> Estimate:
        return _binomial_estimate(self.hits, self.shots)

    def to_dict(self) -> Dict[str, Any]:
        est = self.estimate
        out: Dict[str, Any] = {
            "x_set": sorted(self.setting.x_set),
            "shots": self.shots,
            "hits": self.hits,
            "estimate": float(est.value),
            "stderr": est.stderr,
            "truncated": self.truncated,
        }
        if self.outcomes is not None:
            out["outcomes"] = {
                "shape": list(self.outcomes.shape),
                "packed": base64.b64encode(np.packbits(self.outcomes, axis=1).tobytes()).decode("ascii"),
            }
        return out


CSV_COLUMNS = ("setting", "x_set", "shots", "hits", "estimate", "stderr", "truncated")


@dataclass(frozen=True, eq=False)
class ExperimentRecord:
    graph_id: str
    coloring: Coloring
    p: float
    seed: Optional[int]
    settings: Tuple[SettingRecord, ...]

    @property
    def truncated(self) -> bool:
        return any(s.truncated for s in self.settings)

    def estimates(self) -> List[Estimate]:
        return [s.estimate for s in self.settings]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "graph": self.graph_id,
            "coloring": self.coloring.to_json(),
            "noise": self.p,
            "seed": self.seed,
            "truncated": self.truncated,
            "settings": [s.to_dict() for s in self.settings],
        }

    def to_csv_rows(self) -> List[Tuple[Any, ...]]:
        rows = []
        for s in self.settings:
            est = s.estimate
            rows.append(
                (
                    s.setting.label(),
                    " ".join(str(q) for q in sorted(s.setting.x_set)),
                    s.shots,
                    s.hits,
                    f"{float(est.value):.10g}",
                    f"{est.stderr:.10g}",
                    s.truncated,
                )
            )
        return rows


def unpack_outcomes(packed: str, shape: Sequence[int]) -> np.ndarray:
    shots, n = shape
    raw = np.frombuffer(base64.b64decode(packed), dtype=np.uint8).reshape(shots, -1)
    return np.unpackbits(raw, axis=1, count=n)


def record_from_dict(data: Dict[str, Any], g: Graph) -> ExperimentRecord:
    """Rebuild a record, re-deriving hits from raw outcomes where they were kept"""
    coloring = Coloring(tuple(frozenset(c) for c in data["coloring"]))
    settings = []
    for entry, cls in zip(data["settings"], coloring.classes):
        setting = MeasurementSetting.for_class(g.n, cls)
        outcomes = None
        hits = int(entry["hits"])
        if "outcomes" in entry:
            outcomes = unpack_outcomes(entry["outcomes"]["packed"], entry["outcomes"]["shape"])
            hits = int(projector_hits(outcomes, g, cls).sum())
        settings.append(SettingRecord(setting, int(entry["shots"]), hits, outcomes))
    return ExperimentRecord(data["graph"], coloring, float(data["noise"]), data["seed"], tuple(settings))


def run_experiment(
    g: Graph,
    coloring: Coloring,
    p: float,
    shots: int,
    seed: Optional[int] = None,
    dense_gate: int = DEFAULT_DENSE_GATE,
    raw_cap: int = DEFAULT_RAW_CAP,
) -> ExperimentRecord:
    """Sample every setting of the coloring, one independent random stream per setting"""
    coloring.validate(g)
    streams = np.random.SeedSequence(seed).spawn(coloring.k)
    logger.debug(
        "experiment on %s: k=%d, %d shots, p=%s, %s sampler",
        g.label,
        coloring.k,
        shots,
        p,
        "dense" if g.n <= dense_gate else "tableau",
    )
    records = []
    for cls, stream in zip(coloring.classes, streams):
        setting = MeasurementSetting.for_class(g.n, cls)
        rng = np.random.default_rng(stream)
        hits = 0
        kept: List[np.ndarray] = []
        remaining = shots
        while remaining:
            batch = min(remaining, raw_cap)
            outcomes = sample_setting(g, p, setting, batch, rng, dense_gate)
            hits += int(projector_hits(outcomes, g, cls).sum())
            if shots <= raw_cap:
                kept.append(outcomes)
            remaining -= batch
        records.append(SettingRecord(setting, shots, hits, kept[0] if kept else None))
    return ExperimentRecord(g.label, coloring, p, seed, tuple(records))


def subsystem_estimates(
    record: ExperimentRecord, g: Graph, kept: Sequence[int], correct_byproducts: bool = False
) -> List[Estimate]:
    """Projector estimates of the induced subgraph on ``kept``, from the full-graph shots"""
    out = []
    for s, cls in zip(record.settings, record.coloring.classes):
        if not cls & frozenset(kept):
            continue
        if s.outcomes is None:
            raise EstimateError("raw outcomes were not retained; subsystem estimates need them")
        out.append(
            estimate_projector(s.outcomes, g, cls, s.setting, restrict_to=kept, correct_byproducts=correct_byproducts)
        )
    return out
