"""Bit-matrix arithmetic over GF(2).

Rows are packed into Python integers: column ``j`` of a row is bit ``1 << j``.
Row XOR is a single integer operation whatever the width, and every matrix
carries its column count so trailing bits are masked on construction.
"""

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import GraphError


@dataclass(frozen=True)
class BitMatrix:
    n_rows: int
    n_cols: int
    rows: Tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.n_rows:
            raise ValueError(f"expected {self.n_rows} rows, got {len(self.rows)}")
        limit = 1 << self.n_cols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise ValueError(f"row {r:#x} does not fit in {self.n_cols} columns")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], n_cols: Optional[int] = None) -> "BitMatrix":
        """Build from nested 0/1 sequences"""
        rows = [list(r) for r in rows]
        if n_cols is None:
            n_cols = len(rows[0]) if rows else 0
        packed = []
        for r in rows:
            if len(r) != n_cols:
                raise ValueError("ragged rows")
            packed.append(sum(1 << j for j, v in enumerate(r) if v & 1))
        return cls(len(packed), n_cols, tuple(packed))

    @classmethod
    def from_array(cls, array: np.ndarray) -> "BitMatrix":
        array = np.asarray(array)
        if array.ndim != 2:
            raise ValueError("expected a 2-D array")
        return cls.from_rows(array.tolist(), n_cols=array.shape[1])

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> "BitMatrix":
        return cls(n_rows, n_cols, (0,) * n_rows)

    def get(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.n_rows, self.n_cols), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            for j in range(self.n_cols):
                out[i, j] = (r >> j) & 1
        return out

    def transpose(self) -> "BitMatrix":
        cols = [0] * self.n_cols
        for i, r in enumerate(self.rows):
            while r:
                low = r & -r
                cols[low.bit_length() - 1] |= 1 << i
                r ^= low
        return BitMatrix(self.n_cols, self.n_rows, tuple(cols))

    def render(self) -> str:
        """0/1 text grid, one line per row"""
        return "\n".join("".join(str((r >> j) & 1) for j in range(self.n_cols)) for r in self.rows)

    def __str__(self) -> str:
        return self.render()


def rank_of_rows(rows: Iterable[int]) -> int:
    """Rank of packed rows; each incoming row is reduced against the pivot of its lowest set column"""
    pivots = {}
    for r in rows:
        while r:
            low = r & -r
            basis = pivots.get(low)
            if basis is None:
                pivots[low] = r
                break
            r ^= basis
    return len(pivots)


def rank_gf2(m: BitMatrix) -> int:
    return rank_of_rows(m.rows)


@dataclass(frozen=True)
class RowReduceResult:
    rref: BitMatrix
    pivots: Tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.pivots)


def row_reduce(m: BitMatrix) -> RowReduceResult:
    """Reduced row echelon form; pivots are chosen first-nonzero by column order"""
    work: List[int] = list(m.rows)
    pivots = []
    row_idx = 0
    for col in range(m.n_cols):
        bit = 1 << col
        pivot = next((r for r in range(row_idx, len(work)) if work[r] & bit), None)
        if pivot is None:
            continue
        work[row_idx], work[pivot] = work[pivot], work[row_idx]
        for r in range(len(work)):
            if r != row_idx and work[r] & bit:
                work[r] ^= work[row_idx]
        pivots.append(col)
        row_idx += 1
        if row_idx == len(work):
            break
    return RowReduceResult(BitMatrix(m.n_rows, m.n_cols, tuple(work)), tuple(pivots))


def nullspace(m: BitMatrix) -> BitMatrix:
    """Basis of {x : M x = 0}, one basis vector per row (bit j is coordinate j)"""
    reduced = row_reduce(m)
    pivot_set = set(reduced.pivots)
    basis = []
    for free in range(m.n_cols):
        if free in pivot_set:
            continue
        vec = 1 << free
        for i, p in enumerate(reduced.pivots):
            if (reduced.rref.rows[i] >> free) & 1:
                vec |= 1 << p
        basis.append(vec)
    return BitMatrix(len(basis), m.n_cols, tuple(basis))


def solve_affine(m: BitMatrix, rhs: int) -> Tuple[int, Tuple[int, ...]]:
    """Particular solution of M x = rhs (bit i of rhs is row i) plus the free columns.

    Raises ValueError when the system is inconsistent.
    """
    augmented = BitMatrix(
        m.n_rows, m.n_cols + 1, tuple(r | (((rhs >> i) & 1) << m.n_cols) for i, r in enumerate(m.rows))
    )
    reduced = row_reduce(augmented)
    if reduced.pivots and reduced.pivots[-1] == m.n_cols:
        raise ValueError("inconsistent GF(2) system")
    x = 0
    for i, p in enumerate(reduced.pivots):
        if (reduced.rref.rows[i] >> m.n_cols) & 1:
            x |= 1 << p
    pivot_set = set(reduced.pivots)
    free = tuple(c for c in range(m.n_cols) if c not in pivot_set)
    return x, free


def mask_of(indices: Iterable[int]) -> int:
    out = 0
    for i in indices:
        out |= 1 << i
    return out


def bits_of(mask: int) -> List[int]:
    """Ascending indices of the set bits"""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def compress(row: int, columns: Sequence[int]) -> int:
    """Gather the bits of ``row`` at ``columns`` into consecutive low bits"""
    out = 0
    for j, c in enumerate(columns):
        if (row >> c) & 1:
            out |= 1 << j
    return out


def cross_submatrix(g, a: Iterable[int]) -> BitMatrix:
    """Block of the adjacency matrix between ``a`` and its complement, both in ascending vertex order.

    ``g`` is anything with ``n`` and packed adjacency ``rows`` (a ``Graph``).
    """
    a_set = set(a)
    if not a_set or len(a_set) >= g.n or any(not 0 <= v < g.n for v in a_set):
        raise GraphError(f"cut side must be a nonempty proper subset of 0..{g.n - 1}")
    a_sorted = sorted(a_set)
    complement = [v for v in range(g.n) if v not in a_set]
    return BitMatrix(len(a_sorted), len(complement), tuple(compress(g.rows[i], complement) for i in a_sorted))
