"""Finite undirected multigraphs with loops, and their combinatorial metric.

Edge multiplicities weight the Laplacian and the degree count but never the
metric: distances are plain BFS hop counts.
"""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

DENSE_DISTANCE_LIMIT = 4096


class GraphError(ValueError):
    pass


class DisconnectedGraphError(GraphError):
    def __init__(self, u: int, v: int):
        super().__init__(f"disconnected: vertex {v} is unreachable from vertex {u}")
        self.pair = (u, v)


@dataclass(frozen=True)
class Multigraph:
    """Connected multigraph on vertices ``0..vertex_count-1``.

    ``edges`` is the canonical multiplicity list: sorted ``(u, v, mult)``
    triples with ``u <= v`` and ``mult >= 1``; a loop is ``(u, u, mult)``.
    Use :meth:`from_edges` to build one from an arbitrary edge iterable.
    """

    vertex_count: int
    edges: tuple[tuple[int, int, int], ...]
    labels: tuple[str, ...] | None = None
    transitive: bool = False
    name: str = field(default="", compare=False)

    def __post_init__(self):
        n = self.vertex_count
        if n < 1:
            raise GraphError("vertex_count must be positive")
        prev = None
        for u, v, m in self.edges:
            if not (0 <= u <= v < n) or m < 1:
                raise GraphError(f"bad edge entry {(u, v, m)}")
            if prev is not None and (u, v) <= prev:
                raise GraphError("edges must be sorted and aggregated; use Multigraph.from_edges")
            prev = (u, v)
        if self.labels is not None and len(self.labels) != n:
            raise GraphError("labels must have one entry per vertex")
        _check_connected(n, self.edges)

    @classmethod
    def from_edges(
        cls,
        vertex_count: int,
        edges: Iterable[Sequence[int]],
        labels: Sequence[str] | None = None,
        transitive: bool = False,
        name: str = "",
    ) -> "Multigraph":
        """Aggregate ``(u, v)`` or ``(u, v, mult)`` entries into a multigraph."""
        counts: Counter = Counter()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            m = int(e[2]) if len(e) > 2 else 1
            if m < 0:
                raise GraphError(f"negative multiplicity on {(u, v)}")
            if u > v:
                u, v = v, u
            counts[(u, v)] += m
        canon = tuple((u, v, m) for (u, v), m in sorted(counts.items()) if m > 0)
        lab = tuple(str(s) for s in labels) if labels is not None else None
        return cls(vertex_count, canon, lab, bool(transitive), name)

    def omega(self, u: int, v: int) -> int:
        if u > v:
            u, v = v, u
        for a, b, m in self.edges:
            if (a, b) == (u, v):
                return m
        return 0

    def proper_edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Arrays ``(u, v, mult)`` over non-loop edges."""
        rows = [(u, v, m) for u, v, m in self.edges if u != v]
        if not rows:
            z = np.zeros(0, dtype=np.int64)
            return z, z.copy(), z.copy()
        arr = np.array(rows, dtype=np.int64)
        return arr[:, 0], arr[:, 1], arr[:, 2]

    def loops(self) -> dict[int, int]:
        return {u: m for u, v, m in self.edges if u == v}

    def degrees(self) -> np.ndarray:
        """Per-vertex degree, each loop contributing its multiplicity once."""
        deg = np.zeros(self.vertex_count, dtype=np.int64)
        for u, v, m in self.edges:
            deg[u] += m
            if u != v:
                deg[v] += m
        return deg

    def neighbors(self) -> list[list[int]]:
        """Simple adjacency lists (no loops, no repeats), sorted."""
        adj: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for u, v, _ in self.edges:
            if u != v:
                adj[u].append(v)
                adj[v].append(u)
        for a in adj:
            a.sort()
        return adj

    def adjacency_matrix(self) -> np.ndarray:
        """Dense adjacency with ``A[x, x] = omega(x, x)``."""
        n = self.vertex_count
        a = np.zeros((n, n))
        for u, v, m in self.edges:
            a[u, v] += m
            if u != v:
                a[v, u] += m
        return a

    def laplacian_matrix(self) -> np.ndarray:
        """Dense omega-weighted Laplacian; loops do not enter."""
        n = self.vertex_count
        lap = np.zeros((n, n))
        u, v, m = self.proper_edges()
        np.add.at(lap, (u, v), -m)
        np.add.at(lap, (v, u), -m)
        np.add.at(lap, (u, u), m)
        np.add.at(lap, (v, v), m)
        return lap

    def with_loops(self, loops: dict[int, int]) -> "Multigraph":
        extra = [(x, x, m) for x, m in loops.items()]
        return Multigraph.from_edges(
            self.vertex_count, list(self.edges) + extra, self.labels, self.transitive, self.name
        )

    # -- file format -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "vertex_count": self.vertex_count,
            "edges": [list(e) for e in self.edges],
            "labels": list(self.labels) if self.labels is not None else None,
            "transitive": self.transitive,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":")) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "Multigraph":
        try:
            n = int(data["vertex_count"])
            edges = [tuple(int(x) for x in e) for e in data["edges"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphError(f"malformed graph file: {exc}") from None
        for e in edges:
            if len(e) != 3:
                raise GraphError(f"edge entry {list(e)} must be [u, v, mult]")
        return cls.from_edges(n, edges, data.get("labels"), bool(data.get("transitive", False)))

    @classmethod
    def from_json(cls, text: str) -> "Multigraph":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphError(f"malformed graph file: {exc}") from None
        return cls.from_dict(data)


def _check_connected(n: int, edges) -> None:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v, _ in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    root = find(0)
    for x in range(1, n):
        if find(x) != root:
            raise DisconnectedGraphError(0, x)


def bfs_distances(g: Multigraph, source: int, adj: list[list[int]] | None = None) -> np.ndarray:
    """Single-source hop distances by plain BFS."""
    if adj is None:
        adj = g.neighbors()
    dist = np.full(g.vertex_count, -1, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    while queue:
        x = queue.popleft()
        dx = dist[x] + 1
        for y in adj[x]:
            if dist[y] < 0:
                dist[y] = dx
                queue.append(y)
    if (dist < 0).any():
        raise DisconnectedGraphError(source, int(np.argmin(dist)))
    return dist


def multi_source_distances(g: Multigraph, sources, adj: list[list[int]] | None = None) -> np.ndarray:
    """Distance from every vertex to the nearest vertex of ``sources``."""
    if adj is None:
        adj = g.neighbors()
    dist = np.full(g.vertex_count, -1, dtype=np.int64)
    queue = deque()
    for s in sources:
        if dist[s] < 0:
            dist[s] = 0
            queue.append(int(s))
    if not queue:
        raise GraphError("need at least one source")
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


class DistanceMatrix:
    """All-pairs hop distances.

    Held densely up to ``DENSE_DISTANCE_LIMIT`` vertices; above that rows are
    computed per source on demand and :attr:`dense` is unavailable.
    """

    def __init__(self, data: np.ndarray | None = None, graph: Multigraph | None = None):
        if data is None and graph is None:
            raise ValueError("need a dense array or a graph")
        self._data = None if data is None else np.asarray(data, dtype=np.int64)
        self._graph = graph
        self._adj = None
        self.n = self._data.shape[0] if self._data is not None else graph.vertex_count

    @property
    def is_dense(self) -> bool:
        return self._data is not None

    @property
    def dense(self) -> np.ndarray:
        if self._data is None:
            raise GraphError(f"{self.n} vertices exceeds the dense distance limit")
        return self._data

    def row(self, x: int) -> np.ndarray:
        if self._data is not None:
            return self._data[x]
        if self._adj is None:
            self._adj = self._graph.neighbors()
        return bfs_distances(self._graph, x, self._adj)

    def rows(self):
        for x in range(self.n):
            yield self.row(x)

    def __getitem__(self, key):
        if self._data is not None:
            return self._data[key]
        x, y = key
        return self.row(x)[y]

    def __len__(self):
        return self.n


def all_pairs_distances(g: Multigraph, dense: bool | None = None) -> DistanceMatrix:
    """Exact hop distances between all vertex pairs."""
    if dense is None:
        dense = g.vertex_count <= DENSE_DISTANCE_LIMIT
    if not dense:
        return DistanceMatrix(graph=g)
    u, v, _ = g.proper_edges()
    n = g.vertex_count
    adj = csr_matrix((np.ones(len(u)), (u, v)), shape=(n, n))
    d = shortest_path(adj, method="D", directed=False, unweighted=True)
    if not np.isfinite(d).all():
        x, y = np.argwhere(~np.isfinite(d))[0]
        raise DisconnectedGraphError(int(x), int(y))
    return DistanceMatrix(d.astype(np.int64))


def diameter(d: DistanceMatrix) -> int:
    if d.is_dense:
        return int(d.dense.max())
    return int(max(r.max() for r in d.rows()))


def max_degree(g: Multigraph) -> int:
    return int(g.degrees().max())


def is_regular(g: Multigraph) -> bool:
    deg = g.degrees()
    return bool((deg == deg[0]).all())
