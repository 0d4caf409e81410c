"""Cut entropies of graph states and the partition constants built from them.

The entanglement entropy of a graph state across ``{A, complement}`` is the
GF(2) rank of the cross block of the adjacency matrix, so every value here is
an exact integer and every constant an exact dyadic rational ``2**-S``.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from .config import DEFAULT_ENUM_GATE
from .exceptions import BoundUnavailableError, GraphError, PartitionError
from .gf2 import bits_of, mask_of, rank_of_rows
from .graphs import FamilyTag, Graph, build_chain
from .partitions import (
    BlockBipartition,
    Partition,
    block_bipartitions,
    chain_tail_partition,
    check_gate,
    lattice_corner_partition,
    restricted_growth_strings,
    rgs_prefixes,
    stirling2,
)

logger = logging.getLogger(__name__)

MAX_ACHIEVERS = 16
PROGRESS_EVERY = 4096


def dyadic(entropy: int) -> Fraction:
    return Fraction(1, 2**entropy)


@dataclass(frozen=True)
class CutEntropy:
    value: int
    qubits: FrozenSet[int]
    cut: Optional[BlockBipartition] = None

    @property
    def bound(self) -> Fraction:
        return dyadic(self.value)


@dataclass(frozen=True)
class DyadicBound:
    """A constant 2**-entropy with what achieves it"""

    entropy: int
    cuts: Tuple[FrozenSet[int], ...] = ()
    partition: Optional[Partition] = None

    @property
    def value(self) -> Fraction:
        return dyadic(self.entropy)

    def to_json(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "num": self.value.numerator,
            "den": self.value.denominator,
            "entropy": self.entropy,
            "cut": sorted(self.cuts[0]) if self.cuts else None,
        }
        if len(self.cuts) > 1:
            out["co_achievers"] = [sorted(c) for c in self.cuts[1:]]
        if self.partition is not None:
            out["partition"] = self.partition.to_json()["blocks"]
        return out


@dataclass(frozen=True)
class BoundReport:
    c_min: Optional[DyadicBound] = None
    c_max: Optional[DyadicBound] = None
    c_m: Optional[DyadicBound] = None
    m: Optional[int] = None
    family_tag: Optional[str] = None
    tight: Optional[bool] = None
    partitions_scanned: int = field(default=0, compare=False)

    def to_json(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {}
        for name in ("c_min", "c_max", "c_m"):
            bound = getattr(self, name)
            if bound is not None:
                out[name] = bound.to_json()
        if self.c_m is not None:
            out["m"] = self.m
            out["family"] = self.family_tag
            out["tight"] = "unknown" if self.tight is None else self.tight
            out["partitions_scanned"] = self.partitions_scanned
        return out


def _entropy_of_mask(g: Graph, a_mask: int) -> int:
    outside = g.vertex_mask & ~a_mask
    return rank_of_rows(g.rows[i] & outside for i in bits_of(a_mask))


def cut_entropy(g: Graph, a: Iterable[int]) -> CutEntropy:
    qubits = frozenset(a)
    if not qubits or len(qubits) >= g.n or any(not 0 <= v < g.n for v in qubits):
        raise GraphError(f"cut side must be a nonempty proper subset of 0..{g.n - 1}")
    return CutEntropy(_entropy_of_mask(g, mask_of(qubits)), qubits)


class EntropyCache:
    """Cut entropies of one graph memoized by vertex bitmask"""

    def __init__(self, g: Graph):
        self.g = g
        self._values: Dict[int, int] = {}

    def __call__(self, a_mask: int) -> int:
        value = self._values.get(a_mask)
        if value is None:
            value = _entropy_of_mask(self.g, a_mask)
            self._values[a_mask] = value
            self._values[self.g.vertex_mask ^ a_mask] = value
        return value


def _require_cuttable(g: Graph, p: Partition) -> None:
    if p.n != g.n:
        raise PartitionError(f"partition covers {p.n} qubits, graph has {g.n}")
    if p.m < 2:
        raise PartitionError(f"bounds need at least two blocks, got m={p.m}")


def cut_entropies(g: Graph, p: Partition) -> List[CutEntropy]:
    """Entropy of every block bipartition, in enumeration order"""
    _require_cuttable(g, p)
    cache = EntropyCache(g)
    return [CutEntropy(cache(mask_of(cut.qubits)), cut.qubits, cut) for cut in block_bipartitions(p)]


def max_cut_entropy(g: Graph, p: Partition) -> int:
    return max(c.value for c in cut_entropies(g, p))


def _achievers(entries: Sequence[CutEntropy], value: int) -> Tuple[FrozenSet[int], ...]:
    return tuple(e.qubits for e in entries if e.value == value)[:MAX_ACHIEVERS]


def c_min_c_max(g: Graph, p: Partition) -> BoundReport:
    """Smallest and largest 2**-S over the block bipartitions of ``p``"""
    if not g.is_connected():
        raise GraphError(f"{g.label} is disconnected")
    entries = cut_entropies(g, p)
    hi = max(e.value for e in entries)
    lo = min(e.value for e in entries)
    return BoundReport(
        c_min=DyadicBound(hi, _achievers(entries, hi), p),
        c_max=DyadicBound(lo, _achievers(entries, lo), p),
    )


@dataclass
class _ScanResult:
    best: Optional[int] = None
    best_rgs: Optional[Tuple[int, ...]] = None
    scanned: int = 0


def _scan(
    g: Graph,
    m: int,
    prefix: Tuple[int, ...],
    floor: int,
    progress: Optional[Callable[[int], None]] = None,
) -> _ScanResult:
    """Minimize the largest cut entropy over every partition extending ``prefix``.

    A partition is abandoned as soon as one of its cuts reaches the best value
    so far; the scan stops once ``floor`` is reached.
    """
    cache = EntropyCache(g)
    n_cuts = (1 << (m - 1)) - 1
    result = _ScanResult()
    for rgs in restricted_growth_strings(g.n, m, prefix):
        result.scanned += 1
        if progress is not None and result.scanned % PROGRESS_EVERY == 0:
            progress(PROGRESS_EVERY)
        blocks = [0] * m
        for v, label in enumerate(rgs):
            blocks[label] |= 1 << v
        unions = [blocks[0]] * n_cuts
        worst = 0
        for s in range(n_cuts):
            if s:
                low = s & -s
                unions[s] = unions[s ^ low] | blocks[low.bit_length()]
            value = cache(unions[s])
            if value > worst:
                worst = value
                if result.best is not None and worst >= result.best:
                    break
        else:
            result.best, result.best_rgs = worst, rgs
            if worst <= floor:
                break
    if progress is not None:
        progress(result.scanned % PROGRESS_EVERY)
    return result


def _scan_chunk(args: Tuple[Graph, int, Tuple[int, ...], int]) -> _ScanResult:
    g, m, prefix, floor = args
    return _scan(g, m, prefix, floor)


def c_m_exhaustive(
    g: Graph,
    m: int,
    gate: int = DEFAULT_ENUM_GATE,
    override: bool = False,
    threads: int = 1,
    progress: Optional[Callable[[int], None]] = None,
) -> BoundReport:
    """max over m-partitions of min over their cuts of 2**-S, by full enumeration"""
    if not 2 <= m <= g.n:
        raise PartitionError(f"block count m={m} out of range 2..{g.n}")
    check_gate(g.n, gate, override)
    floor = 1 if g.is_connected() else 0
    logger.debug("c_m scan of %s, m=%d over %d partitions, %d worker(s)", g.label, m, stirling2(g.n, m), threads)
    if threads > 1:
        result = _parallel_scan(g, m, floor, threads, progress)
    else:
        result = _scan(g, m, (0,), floor, progress)
    assert result.best is not None and result.best_rgs is not None
    best_partition = Partition.from_labels(result.best_rgs)
    entries = cut_entropies(g, best_partition)
    return BoundReport(
        c_m=DyadicBound(result.best, _achievers(entries, result.best), best_partition),
        m=m,
        partitions_scanned=result.scanned,
    )


def _parallel_scan(
    g: Graph, m: int, floor: int, threads: int, progress: Optional[Callable[[int], None]]
) -> _ScanResult:
    length = 1
    prefixes = rgs_prefixes(g.n, m, length)
    while len(prefixes) < 4 * threads and length < g.n:
        length += 1
        prefixes = rgs_prefixes(g.n, m, length)
    merged = _ScanResult()
    with ProcessPoolExecutor(max_workers=threads) as executor:
        # map keeps chunk order, so ties go to the lexicographically first partition as in the serial scan
        for part in executor.map(_scan_chunk, [(g, m, prefix, floor) for prefix in prefixes]):
            merged.scanned += part.scanned
            if progress is not None:
                progress(part.scanned)
            if part.best is not None and (merged.best is None or part.best < merged.best):
                merged.best, merged.best_rgs = part.best, part.best_rgs
    return merged


def gamma(m: int) -> int:
    """Smallest d with d(d+1)/2 >= m-1, i.e. ceil((-1 + sqrt(1 + 8(m-1))) / 2)"""
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    d = 0
    while d * (d + 1) // 2 < m - 1:
        d += 1
    return d


FamilySpec = Union[str, FamilyTag]


def c_m_analytic(family: FamilySpec, m: int) -> BoundReport:
    """Closed-form constant for the chain, lattice and GHZ families.

    ``family`` is a tag such as ``("chain", 8)``, ``("lattice", 5, 5)`` or
    ``("ghz", 10)``; "chain" and "ghz" may also be given bare.
    """
    tag = (family,) if isinstance(family, str) else tuple(family)
    name = tag[0]
    if m < 2:
        raise BoundUnavailableError(f"closed-form bounds need m >= 2, got {m}")
    if name == "chain":
        n = tag[1] if len(tag) > 1 else None
        if n is not None and m > n:
            raise BoundUnavailableError(f"m={m} exceeds the chain length {n}")
        partition = chain_tail_partition(n, m) if n is not None else None
        return BoundReport(c_m=DyadicBound(m // 2, (), partition), m=m, family_tag="chain", tight=True)
    if name == "ghz":
        n = tag[1] if len(tag) > 1 else None
        if n is not None and m > n:
            raise BoundUnavailableError(f"m={m} exceeds the qubit count {n}")
        partition = chain_tail_partition(n, m) if n is not None else None
        return BoundReport(c_m=DyadicBound(1, (), partition), m=m, family_tag="ghz", tight=True)
    if name == "lattice":
        if len(tag) != 3:
            raise BoundUnavailableError("the lattice bound needs its dimensions, e.g. ('lattice', 5, 5)")
        rows, cols = tag[1], tag[2]
        if rows == 1 or cols == 1:
            return c_m_analytic(("chain", rows * cols), m)
        if rows == 2 and cols == 2:
            # the 2x2 lattice is a 4-cycle: opposite corners share both neighbors
            raise BoundUnavailableError("no closed-form bound for the 2x2 lattice")
        n = rows * cols
        if n < m * (m - 1) // 2:
            raise BoundUnavailableError(f"the lattice bound needs N >= m(m-1)/2; N={n}, m={m}")
        tight = m <= 5
        partition = lattice_corner_partition(rows, cols, m) if tight and rows >= 2 and cols >= 2 else None
        return BoundReport(
            c_m=DyadicBound(gamma(m), (), partition),
            m=m,
            family_tag=f"lattice:{rows}x{cols}",
            tight=True if tight else None,
        )
    raise BoundUnavailableError(f"no closed-form bound for family {name!r}")


def boundary_count_lower_bound(g: Graph, a: Iterable[int]) -> int:
    """Number of chain edges crossing the cut ``a``"""
    if g != build_chain(g.n):
        raise GraphError(f"{g.label} is not a chain")
    inside = frozenset(a)
    return sum(1 for i in range(g.n - 1) if (i in inside) != (i + 1 in inside))
