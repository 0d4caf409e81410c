"""System partitions and the block bipartitions they induce.

Partitions are enumerated lazily as restricted growth strings: ``a[0] = 0``
and ``a[i] <= max(a[:i]) + 1``. Each string is one set partition with blocks
labelled in order of their smallest element, which is the canonical form used
everywhere in the package.
"""

import json
import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterable, Iterator, List, Sequence, Tuple

from .config import DEFAULT_ENUM_GATE
from .exceptions import GateExceededError, PartitionError
from .gf2 import mask_of

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Partition:
    n: int
    blocks: Tuple[FrozenSet[int], ...]

    def __post_init__(self):
        if not self.blocks:
            raise PartitionError("a partition needs at least one block")
        covered: set = set()
        for i, block in enumerate(self.blocks):
            if not block:
                raise PartitionError(f"block {i} is empty")
            if covered & block:
                raise PartitionError(f"qubits {sorted(covered & block)} are in two blocks")
            covered |= block
        missing = set(range(self.n)) - covered
        if missing:
            raise PartitionError(f"qubits {sorted(missing)} are in no block")
        if covered - set(range(self.n)):
            raise PartitionError(f"qubits {sorted(covered - set(range(self.n)))} are out of range")
        firsts = [min(b) for b in self.blocks]
        if firsts != sorted(firsts):
            raise PartitionError("blocks are not in canonical order")

    @classmethod
    def from_blocks(cls, n: int, blocks: Iterable[Iterable[int]]) -> "Partition":
        """Canonicalize arbitrary block order"""
        frozen = [frozenset(int(v) for v in b) for b in blocks]
        if any(not b for b in frozen):
            raise PartitionError("blocks must be nonempty")
        return cls(n, tuple(sorted(frozen, key=min)))

    @classmethod
    def from_labels(cls, labels: Sequence[Any]) -> "Partition":
        order: Dict[Any, int] = {}
        members: List[List[int]] = []
        for v, label in enumerate(labels):
            if label not in order:
                order[label] = len(members)
                members.append([])
            members[order[label]].append(v)
        return cls(len(labels), tuple(frozenset(b) for b in members))

    @classmethod
    def from_json(cls, n: int, data) -> "Partition":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            return cls.from_blocks(n, data["blocks"])
        except (KeyError, TypeError, ValueError) as e:
            raise PartitionError(f"invalid partition JSON: {e}") from e

    @property
    def m(self) -> int:
        return len(self.blocks)

    @property
    def masks(self) -> Tuple[int, ...]:
        return tuple(mask_of(b) for b in self.blocks)

    @property
    def labels(self) -> Tuple[int, ...]:
        out = [0] * self.n
        for i, block in enumerate(self.blocks):
            for v in block:
                out[v] = i
        return tuple(out)

    def qubits_of(self, block_indices: Iterable[int]) -> FrozenSet[int]:
        out: FrozenSet[int] = frozenset()
        for i in block_indices:
            out |= self.blocks[i]
        return out

    def restrict(self, keep: Iterable[int]) -> Tuple["Partition", Tuple[int, ...]]:
        """Partition of the kept blocks' qubits, reindexed; also returns kept qubits (old indices)"""
        keep = sorted(set(keep))
        for i in keep:
            if not 0 <= i < self.m:
                raise PartitionError(f"block {i} out of range 0..{self.m - 1}")
        kept = tuple(sorted(self.qubits_of(keep)))
        index = {old: new for new, old in enumerate(kept)}
        return Partition.from_blocks(len(kept), [[index[v] for v in self.blocks[i]] for i in keep]), kept

    def to_text(self) -> str:
        return ",".join(str(x) for x in self.labels)

    def to_json(self) -> Dict[str, List[List[int]]]:
        return {"blocks": [sorted(b) for b in self.blocks]}


@dataclass(frozen=True)
class BlockBipartition:
    a_side: FrozenSet[int]
    qubits: FrozenSet[int]

    def to_json(self) -> Dict[str, List[int]]:
        return {"blocks": sorted(self.a_side), "qubits": sorted(self.qubits)}


def parse_partition(n: int, spec: str) -> Partition:
    """Comma-separated block labels ("0,1,1,2"), a JSON object or a path to a JSON file"""
    text = spec.strip()
    if not text:
        raise PartitionError("empty partition spec")
    if text.startswith("{"):
        return Partition.from_json(n, text)
    if text.endswith(".json"):
        try:
            return Partition.from_json(n, Path(text).read_text(encoding="utf8"))
        except OSError as e:
            raise PartitionError(f"cannot read partition file {text}: {e}") from e
    labels = [tok.strip() for tok in text.split(",")]
    if any(tok == "" for tok in labels):
        raise PartitionError(f"empty block label in {spec!r}")
    if len(labels) < n:
        raise PartitionError(f"partition labels qubits 0..{len(labels) - 1} only; qubit {len(labels)} is missing")
    if len(labels) > n:
        raise PartitionError(f"partition labels {len(labels)} qubits but the graph has {n}")
    return Partition.from_labels(labels)


def block_bipartitions(p: Partition) -> List[BlockBipartition]:
    """Every cut of the blocks once, always with block 0 on the A side"""
    if p.m < 2:
        raise PartitionError(f"bipartitions need at least two blocks, got m={p.m}")
    out = []
    for others in range((1 << (p.m - 1)) - 1):
        a_side = frozenset([0] + [i + 1 for i in range(p.m - 1) if (others >> i) & 1])
        out.append(BlockBipartition(a_side, p.qubits_of(a_side)))
    return out


@lru_cache(maxsize=None)
def stirling2(n: int, m: int) -> int:
    """Stirling number of the second kind"""
    if n == m:
        return 1
    if m == 0 or m > n:
        return 0
    return m * stirling2(n - 1, m) + stirling2(n - 1, m - 1)


def check_gate(n: int, gate: int = DEFAULT_ENUM_GATE, override: bool = False) -> None:
    if n > gate and not override:
        raise GateExceededError(
            f"exhaustive enumeration over {n} qubits exceeds the gate of {gate}; pass an override to force it",
            limit=gate,
            requested=n,
        )


def restricted_growth_strings(n: int, m: int, prefix: Sequence[int] = (0,)) -> Iterator[Tuple[int, ...]]:
    """Strings with exactly m distinct labels, in lexicographic order, extending ``prefix``"""
    if n == 0:
        return
    a = list(prefix) + [0] * (n - len(prefix))

    def extend(i: int, used: int) -> Iterator[Tuple[int, ...]]:
        if used + (n - i) < m:
            return
        if i == n:
            yield tuple(a)
            return
        for v in range(min(used + 1, m)):
            a[i] = v
            yield from extend(i + 1, max(used, v + 1))

    yield from extend(len(prefix), max(prefix) + 1)


def rgs_prefixes(n: int, m: int, length: int) -> List[Tuple[int, ...]]:
    """Feasible string prefixes of the given length; they split the stream into disjoint chunks"""
    length = max(1, min(length, n))
    out = []

    def grow(prefix: List[int], used: int) -> None:
        if used + (n - len(prefix)) < m:
            return
        if len(prefix) == length:
            out.append(tuple(prefix))
            return
        for v in range(min(used + 1, m)):
            grow(prefix + [v], max(used, v + 1))

    grow([0], 1)
    return out


def enumerate_m_partitions(
    n: int, m: int, gate: int = DEFAULT_ENUM_GATE, override: bool = False
) -> Iterator[Partition]:
    if not 1 <= m <= n:
        raise PartitionError(f"block count m={m} out of range 1..{n}")
    check_gate(n, gate, override)
    logger.debug("enumerating %d partitions of %d qubits into %d blocks", stirling2(n, m), n, m)
    for rgs in restricted_growth_strings(n, m):
        yield Partition.from_labels(rgs)


def chain_tail_partition(n: int, m: int) -> Partition:
    """One prefix block followed by m-1 trailing singletons"""
    if not 1 <= m <= n:
        raise PartitionError(f"block count m={m} out of range 1..{n}")
    return Partition.from_labels([0] * (n - m + 1) + list(range(1, m)))


_CORNER = ((0, 0), (0, 1), (1, 0), (1, 1))


def lattice_corner_partition(rows: int, cols: int, m: int) -> Partition:
    """m-1 singletons packed into the lattice corner, the rest as one block (m <= 5)"""
    if not 2 <= m <= len(_CORNER) + 1:
        raise PartitionError(f"the corner construction covers 2 <= m <= {len(_CORNER) + 1}, got m={m}")
    if rows < 2 or cols < 2 or rows * cols <= m - 1:
        raise PartitionError(f"a {rows}x{cols} lattice is too small for the corner construction with m={m}")
    singletons = [[r * cols + c] for r, c in _CORNER[: m - 1]]
    taken = {s[0] for s in singletons}
    rest = [v for v in range(rows * cols) if v not in taken]
    return Partition.from_blocks(rows * cols, singletons + [rest])
