"""Graphs, the standard graph-state families, colorings and graph moves.

Adjacency is kept as packed bit rows (bit ``j`` of ``rows[i]`` is the edge
``(i, j)``), so neighborhood toggles and cut extraction are integer XORs and
masks. Every structure here is immutable.
"""

import json
import logging
import re
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from numba import jit

from .exceptions import ColoringError, GraphError
from .gf2 import BitMatrix, bits_of, mask_of

logger = logging.getLogger(__name__)

FamilyTag = Tuple[Any, ...]


@dataclass(frozen=True)
class Graph:
    n: int
    rows: Tuple[int, ...]
    family: Optional[FamilyTag] = field(default=None, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise GraphError(f"a graph needs at least one vertex, got n={self.n}")
        if len(self.rows) != self.n:
            raise GraphError(f"expected {self.n} adjacency rows, got {len(self.rows)}")
        full = (1 << self.n) - 1
        for i, r in enumerate(self.rows):
            if r & ~full:
                raise GraphError(f"vertex {i} has a neighbor outside 0..{self.n - 1}")
            if (r >> i) & 1:
                raise GraphError(f"self-loop at vertex {i}")
            for j in bits_of(r):
                if not (self.rows[j] >> i) & 1:
                    raise GraphError(f"adjacency is not symmetric at ({i}, {j})")

    def neighbors(self, i: int) -> List[int]:
        self._check_vertex(i)
        return bits_of(self.rows[i])

    def degree(self, i: int) -> int:
        return bin(self.rows[i]).count("1")

    def has_edge(self, i: int, j: int) -> bool:
        return bool((self.rows[i] >> j) & 1)

    @property
    def edges(self) -> List[Tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in bits_of(self.rows[i] >> (i + 1) << (i + 1))]

    @property
    def num_edges(self) -> int:
        return sum(self.degree(i) for i in range(self.n)) // 2

    @property
    def vertex_mask(self) -> int:
        return (1 << self.n) - 1

    @property
    def adjacency(self) -> BitMatrix:
        return BitMatrix(self.n, self.n, self.rows)

    @property
    def label(self) -> str:
        """Stable identifier used as graph_id in records"""
        if self.family is not None:
            name, *params = self.family
            if name == "lattice":
                return f"lattice:{params[0]}x{params[1]}"
            return f"{name}:{params[0]}"
        return f"graph:n={self.n},e={self.num_edges}"

    def is_connected(self) -> bool:
        seen = 1
        frontier = 1
        while frontier:
            reach = 0
            for v in bits_of(frontier):
                reach |= self.rows[v]
            frontier = reach & ~seen
            seen |= frontier
        return seen == self.vertex_mask

    def _check_vertex(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise GraphError(f"vertex {i} out of range 0..{self.n - 1}")

    def to_json(self) -> Dict[str, Any]:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g


def from_edge_list(n: int, edges: Iterable[Sequence[int]], family: Optional[FamilyTag] = None) -> Graph:
    if n < 1:
        raise GraphError(f"a graph needs at least one vertex, got n={n}")
    rows = [0] * n
    for edge in edges:
        if len(edge) != 2:
            raise GraphError(f"edge {edge!r} does not have two endpoints")
        i, j = int(edge[0]), int(edge[1])
        if not (0 <= i < n and 0 <= j < n):
            raise GraphError(f"edge ({i}, {j}) is out of range for n={n}")
        if i == j:
            raise GraphError(f"self-loop at vertex {i}")
        rows[i] |= 1 << j
        rows[j] |= 1 << i
    return Graph(n, tuple(rows), family)


def from_networkx(g: nx.Graph) -> Graph:
    """Relabels nodes 0..n-1 in sorted node order"""
    nodes = sorted(g.nodes())
    index = {v: i for i, v in enumerate(nodes)}
    return from_edge_list(len(nodes), [(index[a], index[b]) for a, b in g.edges()])


def graph_from_json(data) -> Graph:
    if isinstance(data, str):
        data = json.loads(data)
    try:
        return from_edge_list(int(data["n"]), data["edges"])
    except (KeyError, TypeError, ValueError) as e:
        raise GraphError(f"invalid graph JSON: {e}") from e


def build_chain(n: int) -> Graph:
    if n < 1:
        raise GraphError(f"chain needs n >= 1, got {n}")
    return from_edge_list(n, [(i, i + 1) for i in range(n - 1)], ("chain", n))


def build_lattice(rows: int, cols: int) -> Graph:
    """rows x cols grid, vertex r*cols + c"""
    if rows < 1 or cols < 1:
        raise GraphError(f"lattice needs positive dimensions, got {rows}x{cols}")
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return from_edge_list(rows * cols, edges, ("lattice", rows, cols))


def build_star(n: int) -> Graph:
    if n < 2:
        raise GraphError(f"star needs n >= 2, got {n}")
    return from_edge_list(n, [(0, i) for i in range(1, n)], ("star", n))


def build_ring(n: int) -> Graph:
    if n < 3:
        raise GraphError(f"ring needs n >= 3, got {n}")
    return from_edge_list(n, [(i, (i + 1) % n) for i in range(n)], ("ring", n))


def build_complete(n: int) -> Graph:
    if n < 2:
        raise GraphError(f"complete graph needs n >= 2, got {n}")
    return from_edge_list(n, [(i, j) for i in range(n) for j in range(i + 1, n)], ("complete", n))


BUILDERS = {
    "chain": build_chain,
    "ring": build_ring,
    "star": build_star,
    "complete": build_complete,
}

_SPEC_RE = re.compile(r"^(chain|ring|star|complete):(\d+)$|^lattice:(\d+)x(\d+)$")


def parse_graph_spec(text: str) -> Graph:
    """Builder mini-language ("chain:6", "lattice:5x5", ...) or a path to a graph JSON file"""
    text = text.strip()
    match = _SPEC_RE.match(text)
    if match:
        if match.group(1):
            return BUILDERS[match.group(1)](int(match.group(2)))
        return build_lattice(int(match.group(3)), int(match.group(4)))
    path = Path(text)
    if path.suffix == ".json" or path.is_file():
        try:
            return graph_from_json(path.read_text(encoding="utf8"))
        except OSError as e:
            raise GraphError(f"cannot read graph file {text}: {e}") from e
    raise GraphError(f"unrecognized graph spec {text!r}; expected e.g. chain:6, lattice:5x5 or a JSON file")


def identify_family(g: Graph) -> Optional[FamilyTag]:
    """Builder tag whose output equals ``g`` exactly, if any"""
    n = g.n
    candidates: List[Graph] = [build_chain(n)]
    if n >= 2:
        candidates += [build_star(n), build_complete(n)]
    if n >= 3:
        candidates.append(build_ring(n))
    for rows in range(2, n):
        if n % rows == 0 and n // rows >= 2:
            candidates.append(build_lattice(rows, n // rows))
    for candidate in candidates:
        if candidate == g:
            return candidate.family
    return None


def analytic_family(g: Graph) -> Optional[FamilyTag]:
    """Family with closed-form partition bounds: ("chain", n), ("lattice", r, c) or ("ghz", n)"""
    tag = g.family if g.family is not None else identify_family(g)
    if tag is None:
        return None
    name = tag[0]
    if name == "lattice" and 1 in tag[1:]:
        return ("chain", g.n)
    if name in ("chain", "lattice"):
        return tag
    if name in ("star", "complete") or (name == "ring" and g.n == 3):
        return ("ghz", g.n)
    return None


def local_complement(g: Graph, i: int) -> Graph:
    """Toggle every edge inside the neighborhood of ``i``"""
    g._check_vertex(i)
    hood = g.rows[i]
    rows = list(g.rows)
    for j in bits_of(hood):
        rows[j] ^= hood & ~(1 << j)
    return Graph(g.n, tuple(rows))


def delete_vertices(g: Graph, drop: Iterable[int]) -> Tuple[Graph, Tuple[int, ...]]:
    """Induced subgraph on the remaining vertices.

    Returns the subgraph and ``kept`` where ``kept[new] == old``.
    """
    drop = set(drop)
    for v in drop:
        g._check_vertex(v)
    if not drop:
        return g, tuple(range(g.n))
    kept = tuple(v for v in range(g.n) if v not in drop)
    if not kept:
        raise GraphError("cannot delete every vertex")
    index = {old: new for new, old in enumerate(kept)}
    rows = []
    for old in kept:
        rows.append(mask_of(index[j] for j in bits_of(g.rows[old]) if j in index))
    return Graph(len(kept), tuple(rows)), kept


@dataclass(frozen=True)
class Coloring:
    classes: Tuple[FrozenSet[int], ...]

    def __post_init__(self):
        seen: set = set()
        for cls in self.classes:
            if not cls:
                raise ColoringError("color classes must be nonempty")
            if seen & cls:
                raise ColoringError(f"vertices {sorted(seen & cls)} appear in two classes")
            seen |= cls
        if seen != set(range(len(seen))):
            raise ColoringError("color classes must cover vertices 0..n-1")

    @classmethod
    def from_assignment(cls, colors: Sequence[int]) -> "Coloring":
        k = max(colors) + 1 if colors else 0
        return cls(tuple(frozenset(v for v, c in enumerate(colors) if c == l) for l in range(k)))

    @property
    def k(self) -> int:
        return len(self.classes)

    @property
    def n(self) -> int:
        return sum(len(c) for c in self.classes)

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(len(c) for c in self.classes)

    def color_of(self, v: int) -> int:
        for l, cls in enumerate(self.classes):
            if v in cls:
                return l
        raise ColoringError(f"vertex {v} is not colored")

    def validate(self, g: Graph) -> None:
        if self.n != g.n:
            raise ColoringError(f"coloring covers {self.n} vertices, graph has {g.n}")
        for l, cls in enumerate(self.classes):
            m = mask_of(cls)
            for v in cls:
                if g.rows[v] & m:
                    raise ColoringError(f"class {l} is not independent at vertex {v}")

    def restrict(self, kept: Sequence[int]) -> "Coloring":
        """Coloring of the induced subgraph on ``kept`` (old indices); emptied classes are dropped"""
        index = {old: new for new, old in enumerate(kept)}
        classes = [frozenset(index[v] for v in cls if v in index) for cls in self.classes]
        return Coloring(tuple(c for c in classes if c))

    def to_json(self) -> List[List[int]]:
        return [sorted(c) for c in self.classes]


def two_coloring(g: Graph) -> Optional[Coloring]:
    """Breadth-first 2-coloring; the smallest vertex of each component gets class 0"""
    colors = [-1] * g.n
    for start in range(g.n):
        if colors[start] >= 0:
            continue
        colors[start] = 0
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in bits_of(g.rows[v]):
                if colors[w] < 0:
                    colors[w] = 1 - colors[v]
                    queue.append(w)
                elif colors[w] == colors[v]:
                    return None
    return Coloring.from_assignment(colors)


def _greedy_color_count(g: Graph) -> int:
    order = sorted(range(g.n), key=lambda v: (-g.degree(v), v))
    colors: Dict[int, int] = {}
    for v in order:
        taken = {colors[w] for w in bits_of(g.rows[v]) if w in colors}
        colors[v] = next(c for c in range(g.n) if c not in taken)
    return max(colors.values()) + 1


@jit(nopython=True, cache=True)
def _backtrack_kernel(adjacency: np.ndarray, k: int) -> np.ndarray:
    """Lexicographically smallest proper assignment with at most k colors; empty when there is none.

    Iterative: ``colors[v]`` doubles as the resume point when the search backs up to ``v``.
    """
    n = adjacency.shape[0]
    colors = np.full(n, -1, dtype=np.int64)
    v = 0
    while 0 <= v < n:
        # a vertex may open at most one new color
        used = 0
        for u in range(v):
            used = max(used, colors[u] + 1)
        limit = min(used + 1, k)
        c = colors[v] + 1
        while c < limit:
            clash = False
            for u in range(v):
                if adjacency[v, u] and colors[u] == c:
                    clash = True
                    break
            if not clash:
                break
            c += 1
        if c < limit:
            colors[v] = c
            v += 1
        else:
            colors[v] = -1
            v -= 1
    if v < 0:
        return colors[:0]
    return colors


def _backtrack(g: Graph, k: int) -> Optional[List[int]]:
    colors = _backtrack_kernel(g.adjacency.to_array(), k)
    return [int(c) for c in colors] if len(colors) else None


def chromatic_coloring(g: Graph, k_max: int) -> Coloring:
    """Minimum proper coloring with at most ``k_max`` classes"""
    if k_max < 1:
        raise ColoringError(f"k_max must be at least 1, got {k_max}")
    upper = _greedy_color_count(g)
    lower = 1 if g.num_edges == 0 else 2
    logger.debug("coloring %s: greedy bound %d, searching %d..%d", g.label, upper, lower, min(upper, k_max))
    for k in range(lower, min(upper, k_max) + 1):
        colors = _backtrack(g, k)
        if colors is not None:
            return Coloring.from_assignment(colors)
    raise ColoringError(f"{g.label} has no proper coloring with at most {k_max} classes")


def default_coloring(g: Graph, k_max: int = 8) -> Coloring:
    coloring = two_coloring(g)
    if coloring is None:
        coloring = chromatic_coloring(g, k_max)
    return coloring
