"""Immutable simple graphs over dense integer ids, with packed-bitset sets.

Vertices are 0..n-1. Restrictions to subsets are expressed by passing an
explicit VertexSet to each operation instead of materializing subgraphs, so
every result (stable sets, paths, certificates) speaks in the ids of the host
graph and stays valid verbatim at the top level.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from . import _kernels as K


class GraphFormatError(ValueError):
    """Raised for malformed graph text input."""


class VertexSet:
    """Immutable set of vertex ids packed into uint64 words.

    Bits at positions >= n are always zero; operations preserve this.
    """

    __slots__ = ("n", "words", "_size")

    def __init__(self, n: int, words: np.ndarray):
        self.n = n
        self.words = words
        self._size = K.popcount_words(words)

    @classmethod
    def empty(cls, n: int) -> "VertexSet":
        return cls(n, np.zeros(K.words_for(n), dtype=np.uint64))

    @classmethod
    def full(cls, n: int) -> "VertexSet":
        words = np.zeros(K.words_for(n), dtype=np.uint64)
        if n:
            words[: n >> 6] = np.uint64(0xFFFFFFFFFFFFFFFF)
            rem = n & 63
            if rem:
                words[n >> 6] = (np.uint64(1) << np.uint64(rem)) - np.uint64(1)
        return cls(n, words)

    @classmethod
    def of(cls, n: int, ids: Iterable[int]) -> "VertexSet":
        return cls(n, K.indices_to_words(n, ids))

    def __len__(self) -> int:
        return self._size

    def __bool__(self) -> bool:
        return self._size > 0

    def __contains__(self, v: int) -> bool:
        if v < 0 or v >= self.n:
            return False
        return bool((int(self.words[v >> 6]) >> (v & 63)) & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.to_list())

    def to_list(self) -> list[int]:
        return [int(v) for v in K.words_to_indices(self.words, self.n)]

    def indices(self) -> np.ndarray:
        return K.words_to_indices(self.words, self.n)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, VertexSet)
            and self.n == other.n
            and bool(np.array_equal(self.words, other.words))
        )

    def __or__(self, other: "VertexSet") -> "VertexSet":
        self._check(other)
        return VertexSet(self.n, self.words | other.words)

    def __and__(self, other: "VertexSet") -> "VertexSet":
        self._check(other)
        return VertexSet(self.n, self.words & other.words)

    def __sub__(self, other: "VertexSet") -> "VertexSet":
        self._check(other)
        return VertexSet(self.n, self.words & ~other.words)

    def add(self, v: int) -> "VertexSet":
        """New set with v included."""
        if v < 0 or v >= self.n:
            raise ValueError(f"vertex id {v} out of range")
        words = self.words.copy()
        words[v >> 6] |= np.uint64(1) << np.uint64(v & 63)
        return VertexSet(self.n, words)

    def isdisjoint(self, other: "VertexSet") -> bool:
        self._check(other)
        return K.popcount_words(self.words & other.words) == 0

    def issubset(self, other: "VertexSet") -> bool:
        self._check(other)
        return K.popcount_words(self.words & ~other.words) == 0

    def _check(self, other: "VertexSet") -> None:
        if self.n != other.n:
            raise ValueError("vertex sets belong to different graphs")

    def __repr__(self) -> str:
        return f"VertexSet(n={self.n}, members={self.to_list()})"


@dataclass(frozen=True)
class Path:
    """A sequence of distinct vertices; validity in a host graph is checked
    by the verifiers, not at construction."""

    vertices: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.vertices) - 1


class Graph:
    """Simple undirected graph: no self-loops, no parallel edges."""

    __slots__ = ("n", "m", "_adj", "_deg")

    def __init__(self, n: int, adj_words: np.ndarray, m: int, deg: np.ndarray):
        self.n = n
        self.m = m
        self._adj = adj_words
        self._deg = deg

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        w = K.words_for(n)
        adj = np.zeros((max(1, n), w), dtype=np.uint64)
        m = 0
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if (int(adj[u, v >> 6]) >> (v & 63)) & 1:
                raise ValueError(f"duplicate edge ({u}, {v})")
            adj[u, v >> 6] |= np.uint64(1) << np.uint64(v & 63)
            adj[v, u >> 6] |= np.uint64(1) << np.uint64(u & 63)
            m += 1
        deg = np.bitwise_count(adj).sum(axis=1, dtype=np.int64)
        return cls(n, adj, m, deg)

    def has_edge(self, u: int, v: int) -> bool:
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"vertex pair ({u}, {v}) out of range")
        return bool((int(self._adj[u, v >> 6]) >> (v & 63)) & 1)

    def neighbors(self, v: int) -> VertexSet:
        if not (0 <= v < self.n):
            raise ValueError(f"vertex id {v} out of range")
        return VertexSet(self.n, self._adj[v].copy())

    def vertices(self) -> VertexSet:
        return VertexSet.full(self.n)

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for u in range(self.n):
            for v in K.words_to_indices(self._adj[u], self.n):
                if u < v:
                    out.append((u, int(v)))
        return out

    def adjacency_words(self) -> np.ndarray:
        """Read-only view of the packed adjacency matrix (for kernels)."""
        return self._adj

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


# ---------------------------------------------------------------------------
# core operations


def degree(g: Graph, v: int) -> int:
    if not (0 <= v < g.n):
        raise ValueError(f"vertex id {v} out of range")
    return int(g._deg[v])


def degree_into(g: Graph, v: int, s: VertexSet) -> int:
    """Number of neighbors of v inside s."""
    if not (0 <= v < g.n):
        raise ValueError(f"vertex id {v} out of range")
    return K.popcount_words(g._adj[v] & s.words)


def closed_neighborhood(g: Graph, s: VertexSet) -> VertexSet:
    nb = K.or_rows(g._adj, s.indices())
    return VertexSet(g.n, nb | s.words)


def is_stable(g: Graph, s: VertexSet) -> bool:
    nb = K.or_rows(g._adj, s.indices())
    return K.popcount_words(nb & s.words) == 0


def max_degree(g: Graph, within: VertexSet) -> tuple[int, int]:
    """Vertex of maximum degree in the subgraph induced on `within`, with its
    degree there. Smallest id wins ties. Raises on an empty set."""
    idx = within.indices()
    if idx.size == 0:
        raise ValueError("max_degree of an empty vertex set")
    counts = K.counts_within(g._adj, within.words, idx)
    pos = int(np.argmax(counts))
    return int(idx[pos]), int(counts[pos])


def induced_degrees(g: Graph, within: VertexSet) -> tuple[np.ndarray, np.ndarray]:
    """(ids, degrees) for the subgraph induced on `within`, ids ascending."""
    idx = within.indices()
    return idx, K.counts_within(g._adj, within.words, idx)


def greedy_stable(g: Graph, within: VertexSet | None = None) -> VertexSet:
    """Stable set built by repeatedly taking a minimum-degree vertex (smallest
    id on ties) and deleting its closed neighborhood. Size >= ceil(k/(D+1))
    for k vertices considered and maximum induced degree D."""
    active = g.vertices() if within is None else within
    return VertexSet(g.n, K.greedy_stable(g._adj, active.words, g.n))


def bfs_layers(g: Graph, sources: VertexSet, allowed: VertexSet, r_max: int) -> list[VertexSet]:
    """Layers of reachability: layer r holds every vertex reachable from
    `sources` by a path of length <= r whose non-source vertices lie in
    `allowed`. Sources are included at distance 0 regardless of `allowed`."""
    if r_max < 0:
        raise ValueError("r_max must be nonnegative")
    if not sources:
        raise ValueError("bfs_layers requires nonempty sources")
    layers = [sources]
    layer = sources
    frontier = sources
    for _ in range(r_max):
        grown = K.or_rows(g._adj, frontier.indices()) & allowed.words & ~layer.words
        nxt = VertexSet(g.n, layer.words | grown)
        frontier = VertexSet(g.n, grown)
        layers.append(nxt)
        layer = nxt
    return layers


def shortest_pair_path(
    g: Graph, from_set: VertexSet, to_set: VertexSet, allowed: VertexSet
) -> Path | None:
    """Shortest path starting in `from_set`, ending in `to_set`, with every
    internal vertex in `allowed` minus both endpoint sets. Ties broken by the
    lexicographically smallest vertex sequence. None when no such path."""
    if not from_set or not to_set:
        raise ValueError("endpoint sets must be nonempty")
    if not from_set.isdisjoint(to_set):
        raise ValueError("endpoint sets must be disjoint")

    interior = allowed - from_set - to_set
    # Distance-to-target over interior + to_set, computed backwards from to_set.
    dist = np.full(g.n, -1, dtype=np.int64)
    for v in to_set.indices():
        dist[v] = 0
    visited = to_set
    frontier = to_set
    r = 0
    while frontier:
        grown = VertexSet(
            g.n, K.or_rows(g._adj, frontier.indices()) & interior.words & ~visited.words
        )
        r += 1
        for v in grown.indices():
            dist[v] = r
        visited = visited | grown
        frontier = grown

    best_len = -1
    best_start = -1
    for s in from_set.indices():
        s = int(s)
        reach = g._adj[s] & visited.words
        ridx = K.words_to_indices(reach, g.n)
        if ridx.size == 0:
            continue
        d = 1 + int(dist[ridx].min())
        if best_len < 0 or d < best_len or (d == best_len and s < best_start):
            best_len = d
            best_start = s
    if best_len < 0:
        return None

    # Greedy reconstruction: at each position pick the smallest feasible next
    # vertex; feasibility = adjacent, tracked, and exactly on the remaining
    # distance. This yields the lexicographically smallest shortest sequence.
    seq = [best_start]
    cur = best_start
    togo = best_len
    while togo > 0:
        cand = K.words_to_indices(g._adj[cur] & visited.words, g.n)
        nxt = -1
        for v in cand:
            if dist[v] == togo - 1:
                nxt = int(v)
                break
        if nxt < 0:  # unreachable by construction
            raise RuntimeError("path reconstruction lost the trail")
        seq.append(nxt)
        cur = nxt
        togo -= 1
    return Path(tuple(seq))


def path_is_valid(g: Graph, path: Path) -> bool:
    """Distinct vertices, consecutive ones adjacent."""
    verts = path.vertices
    if len(verts) == 0 or len(set(verts)) != len(verts):
        return False
    if any(not (0 <= v < g.n) for v in verts):
        return False
    return all(g.has_edge(a, b) for a, b in zip(verts, verts[1:]))


def path_is_induced(g: Graph, path: Path) -> bool:
    """Valid path whose vertex set induces exactly the path (no chords)."""
    if not path_is_valid(g, path):
        return False
    verts = path.vertices
    for i in range(len(verts)):
        for j in range(i + 2, len(verts)):
            if g.has_edge(verts[i], verts[j]):
                return False
    return True


# ---------------------------------------------------------------------------
# text format: first line "n m", then m lines "u v" with 0 <= u < v < n


def parse_graph_text(text: str) -> Graph:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise GraphFormatError("empty input")
    head = lines[0].split()
    if len(head) != 2:
        raise GraphFormatError(f"header must be 'n m', got {lines[0]!r}")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise GraphFormatError(f"non-integer header {lines[0]!r}") from exc
    if n < 0 or m < 0:
        raise GraphFormatError("negative counts in header")
    if len(lines) - 1 != m:
        raise GraphFormatError(f"expected {m} edge lines, found {len(lines) - 1}")
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphFormatError(f"edge line must be 'u v', got {ln!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise GraphFormatError(f"non-integer edge line {ln!r}") from exc
        if u >= v:
            raise GraphFormatError(f"edge ({u}, {v}) violates u < v")
        edges.append((u, v))
    try:
        return Graph.from_edges(n, edges)
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from exc


def format_graph_text(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def load_graph(path: str) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph_text(fh.read())


def save_graph(g: Graph, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_graph_text(g))
