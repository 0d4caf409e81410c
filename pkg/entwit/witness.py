"""Witness construction, evaluation and noise robustness.

Every witness here has the form ``c * I - sum_l P_l`` where ``P_l`` is the
stabilizer projector of color class ``l`` and ``c = k - 1 + C`` for a partition
constant ``C``. A negative expectation certifies that the state lies outside
the separability class the constant was computed for.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from .config import DEFAULT_ENUM_GATE, DEFAULT_Z_THRESHOLD
from .entropy import DyadicBound, c_m_analytic, c_m_exhaustive, c_min_c_max
from .exceptions import BoundUnavailableError, EstimateError, GateExceededError, WitnessError
from .graphs import Coloring, Graph, analytic_family, delete_vertices
from .partitions import Partition

logger = logging.getLogger(__name__)

Number = Union[Fraction, int, float]


class WitnessKind(str, Enum):
    FULLY_SEPARABLE = "fully_separable"
    GENUINE = "genuine"
    M_SEPARABLE = "m_separable"
    GME = "gme"


@dataclass(frozen=True)
class Estimate:
    """Projector expectation; exact when ``value`` is rational and ``stderr`` is zero"""

    value: Number
    stderr: float = 0.0
    shots: Optional[int] = None

    @property
    def exact(self) -> bool:
        return isinstance(self.value, (Fraction, int)) and self.stderr == 0

    def to_dict(self) -> Dict[str, Any]:
        return {"value": float(self.value), "stderr": self.stderr, "shots": self.shots}


@dataclass(frozen=True)
class Witness:
    kind: WitnessKind
    constant: Fraction
    bound: Fraction
    graph: Graph
    coloring: Coloring
    context: Union[Partition, int, None] = None
    source: str = "gme"
    kept: Optional[Tuple[int, ...]] = field(default=None)

    @property
    def k(self) -> int:
        return self.coloring.k

    @property
    def class_sizes(self) -> Tuple[int, ...]:
        return self.coloring.sizes

    @property
    def graph_id(self) -> str:
        return self.graph.label

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "kind": self.kind.value,
            "graph": self.graph_id,
            "k": self.k,
            "class_sizes": list(self.class_sizes),
            "constant": {"num": self.constant.numerator, "den": self.constant.denominator},
            "bound": {"num": self.bound.numerator, "den": self.bound.denominator},
            "source": self.source,
        }
        if isinstance(self.context, Partition):
            out["partition"] = self.context.to_json()["blocks"]
        elif isinstance(self.context, int):
            out["m"] = self.context
        if self.kept is not None:
            out["kept_qubits"] = list(self.kept)
        return out


@dataclass(frozen=True)
class WitnessVerdict:
    witness: Witness
    value: Number
    stderr: float
    z_score: Optional[float]
    detected: bool
    interpretation: str

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "kind": self.witness.kind.value,
            "k": self.witness.k,
            "constant": {"num": self.witness.constant.numerator, "den": self.witness.constant.denominator},
            "value": float(self.value),
            "stderr": self.stderr,
            "z_score": self.z_score,
            "detected": self.detected,
            "p_limit": float(noise_threshold(self.witness)),
            "interpretation": self.interpretation,
        }
        if isinstance(self.value, Fraction):
            out["value_exact"] = {"num": self.value.numerator, "den": self.value.denominator}
        if isinstance(self.witness.context, int):
            out["m"] = self.witness.context
        return out


def _check_graph(g: Graph, coloring: Coloring) -> None:
    if g.n < 2:
        raise WitnessError("witnesses need at least two qubits")
    if not g.is_connected():
        raise WitnessError(f"{g.label} is disconnected; witnesses are built for connected graphs only")
    coloring.validate(g)


def m_separable_bound(
    g: Graph, m: int, gate: int = DEFAULT_ENUM_GATE, override: bool = False, threads: int = 1
) -> Tuple[DyadicBound, str]:
    """Constant for m-separable states and where it came from ("analytic:<family>" or "exhaustive")"""
    if not 2 <= m <= g.n:
        raise WitnessError(f"m={m} out of range 2..{g.n}")
    family = analytic_family(g)
    if family is not None:
        try:
            report = c_m_analytic(family, m)
            assert report.c_m is not None
            return report.c_m, f"analytic:{report.family_tag}"
        except BoundUnavailableError as e:
            logger.debug("no closed form for %s at m=%d: %s", g.label, m, e)
    try:
        report = c_m_exhaustive(g, m, gate=gate, override=override, threads=threads)
    except GateExceededError as e:
        raise WitnessError(
            f"no sound m-separable constant for {g.label} at m={m}: no closed form applies and {e.message}"
        ) from e
    assert report.c_m is not None
    return report.c_m, "exhaustive"


def build_witness(
    g: Graph,
    coloring: Coloring,
    kind: Union[WitnessKind, str],
    context: Union[Partition, int, None] = None,
    *,
    gate: int = DEFAULT_ENUM_GATE,
    override: bool = False,
    threads: int = 1,
) -> Witness:
    kind = WitnessKind(kind)
    _check_graph(g, coloring)
    if kind is WitnessKind.GME:
        if context is not None:
            raise WitnessError("the gme witness takes no partition or m")
        bound, source = Fraction(1, 2), "gme"
    elif kind is WitnessKind.M_SEPARABLE:
        if isinstance(context, bool) or not isinstance(context, int):
            raise WitnessError("the m_separable witness needs an integer m")
        c_m, source = m_separable_bound(g, context, gate, override, threads)
        bound = c_m.value
    else:
        if not isinstance(context, Partition):
            raise WitnessError(f"the {kind.value} witness needs a partition")
        if context.n != g.n or context.m < 2:
            raise WitnessError(f"partition must cover all {g.n} qubits with at least two blocks")
        report = c_min_c_max(g, context)
        chosen = report.c_min if kind is WitnessKind.FULLY_SEPARABLE else report.c_max
        assert chosen is not None
        bound, source = chosen.value, "partition"
    constant = coloring.k - 1 + bound
    logger.debug("built %s witness for %s: c=%s (%s)", kind.value, g.label, constant, source)
    return Witness(kind, constant, bound, g, coloring, context, source)


def build_subsystem_witness(
    g: Graph,
    coloring: Coloring,
    partition: Partition,
    keep: Sequence[int],
    kind: Union[WitnessKind, str] = WitnessKind.FULLY_SEPARABLE,
) -> Witness:
    """Witness for the graph with the unkept blocks deleted, evaluable from the original settings"""
    kind = WitnessKind(kind)
    if kind not in (WitnessKind.FULLY_SEPARABLE, WitnessKind.GENUINE):
        raise WitnessError("subsystem witnesses are fully_separable or genuine")
    keep = sorted(set(keep))
    if len(keep) < 2:
        raise WitnessError(f"keeping {len(keep)} block(s) leaves fewer than two subsystems")
    if len(keep) == partition.m:
        return build_witness(g, coloring, kind, partition)
    sub_partition, kept = partition.restrict(keep)
    dropped = set(range(g.n)) - set(kept)
    sub_graph, kept_map = delete_vertices(g, dropped)
    if not sub_graph.is_connected():
        raise WitnessError("the kept blocks induce a disconnected subgraph")
    sub_coloring = coloring.restrict(kept_map)
    witness = build_witness(sub_graph, sub_coloring, kind, sub_partition)
    return Witness(kind, witness.constant, witness.bound, sub_graph, sub_coloring, sub_partition, "subsystem", kept)


def _coerce(estimates: Sequence[Union[Estimate, Number]], k: int) -> List[Estimate]:
    if len(estimates) != k:
        raise EstimateError(f"expected {k} projector estimates, got {len(estimates)}")
    out = [e if isinstance(e, Estimate) else Estimate(e) for e in estimates]
    for l, e in enumerate(out):
        if not 0 <= e.value <= 1:
            raise EstimateError(f"estimate for class {l} is {e.value}, outside [0, 1]")
        if e.stderr < 0:
            raise EstimateError(f"negative stderr for class {l}")
    return out


def _sum(estimates: Sequence[Estimate]) -> Tuple[Number, float]:
    if all(e.exact for e in estimates):
        total: Number = sum((Fraction(e.value) for e in estimates), Fraction(0))
    else:
        total = math.fsum(float(e.value) for e in estimates)
    return total, math.sqrt(math.fsum(e.stderr**2 for e in estimates))


def _interpret(w: Witness, detected: bool) -> str:
    if not detected:
        return "no entanglement structure certified"
    if w.kind is WitnessKind.FULLY_SEPARABLE:
        return "not fully separable across the partition: entangled"
    if w.kind is WitnessKind.GENUINE:
        return "not bi-separable across the partition: genuinely entangled among its blocks"
    if w.kind is WitnessKind.M_SEPARABLE:
        return f"not {w.context}-separable: entanglement intactness <= {int(w.context) - 1}"  # type: ignore[arg-type]
    return "genuine multipartite entanglement"


def evaluate(
    w: Witness, estimates: Sequence[Union[Estimate, Number]], z_threshold: float = DEFAULT_Z_THRESHOLD
) -> WitnessVerdict:
    """<W> = c - sum_l <P_l>; detected when value + z * stderr < 0"""
    coerced = _coerce(estimates, w.k)
    total, stderr = _sum(coerced)
    value: Number = w.constant - total if isinstance(total, Fraction) else float(w.constant) - total
    z_score = value / stderr if stderr > 0 else None
    detected = bool(value < 0) if stderr == 0 else bool(value + z_threshold * stderr < 0)
    return WitnessVerdict(w, value, stderr, z_score, detected, _interpret(w, detected))


def fidelity_lower_bound(estimates: Sequence[Union[Estimate, Number]]) -> Estimate:
    """Lower bound sum_l <P_l> - (k - 1) on the fidelity with the target graph state"""
    coerced = _coerce(estimates, len(estimates))
    total, stderr = _sum(coerced)
    return Estimate(total - (len(coerced) - 1), stderr)


def white_noise_expectation(p: Number, n_l: int) -> Number:
    """<P_l> on (1 - p)|G><G| + p I / 2**n"""
    if not 0 <= p <= 1:
        raise EstimateError(f"noise weight {p} outside [0, 1]")
    if isinstance(p, float):
        return 1.0 - p * (1.0 - 2.0**-n_l)
    return 1 - Fraction(p) * (1 - Fraction(1, 2**n_l))


def noise_threshold(w: Witness) -> Fraction:
    """Largest white-noise weight below which the witness still detects"""
    return (1 - w.bound) / (w.k - sum(Fraction(1, 2**n_l) for n_l in w.class_sizes))


@dataclass(frozen=True)
class IntactnessReport:
    verdicts: Tuple[WitnessVerdict, ...]
    detected_m: Optional[int]

    @property
    def intactness_bound(self) -> Optional[int]:
        return None if self.detected_m is None else self.detected_m - 1

    @property
    def summary(self) -> str:
        if self.detected_m is None:
            return "no detection"
        return f"not {self.detected_m}-separable: intactness <= {self.detected_m - 1}"

    def values(self) -> Dict[int, Number]:
        return {int(v.witness.context): v.value for v in self.verdicts}  # type: ignore[arg-type]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "detected_m": self.detected_m,
            "intactness_bound": self.intactness_bound,
            "summary": self.summary,
            "series": [
                {"m": int(v.witness.context), "value": float(v.value), "detected": v.detected}  # type: ignore[arg-type]
                for v in self.verdicts
            ],
        }


def intactness_scan(
    g: Graph,
    coloring: Coloring,
    estimates: Sequence[Union[Estimate, Number]],
    z_threshold: float = DEFAULT_Z_THRESHOLD,
    *,
    gate: int = DEFAULT_ENUM_GATE,
    override: bool = False,
    threads: int = 1,
    full: bool = False,
) -> IntactnessReport:
    """Evaluate the m-separability witnesses for m = 2..n.

    Detection is monotone in m, so the scan stops at the first detecting m
    unless ``full`` is set. The smallest detecting m bounds the intactness by m - 1.
    """
    verdicts: List[WitnessVerdict] = []
    detected_m: Optional[int] = None
    for m in range(2, g.n + 1):
        try:
            witness = build_witness(
                g, coloring, WitnessKind.M_SEPARABLE, m, gate=gate, override=override, threads=threads
            )
        except WitnessError:
            if detected_m is not None:
                break
            raise
        verdict = evaluate(witness, estimates, z_threshold)
        verdicts.append(verdict)
        if verdict.detected and detected_m is None:
            detected_m = m
            if not full:
                break
    return IntactnessReport(tuple(verdicts), detected_m)


def witness_series(
    g: Graph, coloring: Coloring, estimates: Sequence[Union[Estimate, Number]], ms: Sequence[int], **kwargs
) -> Dict[int, Number]:
    """Witness value for each m in ``ms``"""
    out = {}
    for m in ms:
        w = build_witness(g, coloring, WitnessKind.M_SEPARABLE, m, **kwargs)
        out[m] = evaluate(w, estimates).value
    return out
