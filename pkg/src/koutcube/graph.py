"""Undirected graph views consumed by the analyses.

Analyses are duck-typed on ``num_vertices``, ``edge_arrays()``,
``neighbors(v)`` and ``degrees()``. ``CubeSubgraph`` is the implicit oracle
for spanning subgraphs of the cube; ``SimpleGraph`` covers anything else
(toy graphs, induced subgraphs built in tests).
"""

from __future__ import annotations

import numpy as np

from .hypercube import popcount


class CubeSubgraph:
    """Spanning subgraph of the n-cube stored as one neighbour mask per vertex.

    Bit ``d`` of ``adj[v]`` is set iff the edge ``v -- v ^ (1 << d)`` is present.
    """

    def __init__(self, n: int, adj: np.ndarray):
        self.n = n
        self.adj = np.asarray(adj, dtype=np.uint32)
        if self.adj.shape != (1 << n,):
            raise ValueError("adjacency mask array must have 2**n entries")

    @classmethod
    def full(cls, n: int) -> "CubeSubgraph":
        return cls(n, np.full(1 << n, (1 << n) - 1, dtype=np.uint32))

    @property
    def num_vertices(self) -> int:
        return 1 << self.n

    @property
    def num_edges(self) -> int:
        return int(self.degrees().sum()) // 2

    def degrees(self) -> np.ndarray:
        return popcount(self.adj)

    def has_edge(self, v: int, w: int) -> bool:
        x = v ^ w
        if x == 0 or x & (x - 1):
            return False
        return bool(self.adj[v] & x)

    def neighbors(self, v: int) -> list[int]:
        m = int(self.adj[v])
        return [v ^ (1 << d) for d in range(self.n) if m >> d & 1]

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Each undirected edge once, as ``(low, high)`` endpoint arrays."""
        ids = np.arange(1 << self.n, dtype=np.int64)
        lows, highs = [], []
        for d in range(self.n):
            sel = ((ids >> d) & 1 == 0) & ((self.adj >> np.uint32(d)) & 1 == 1)
            lo = ids[sel]
            lows.append(lo)
            highs.append(lo | (1 << d))
        return np.concatenate(lows), np.concatenate(highs)


class SimpleGraph:
    """Plain undirected graph on ``range(num_vertices)`` from an edge list."""

    def __init__(self, num_vertices: int, edges):
        self._nv = int(num_vertices)
        adj = [set() for _ in range(self._nv)]
        for u, w in edges:
            u, w = int(u), int(w)
            if u == w:
                continue
            adj[u].add(w)
            adj[w].add(u)
        self._adj = [sorted(s) for s in adj]

    @property
    def num_vertices(self) -> int:
        return self._nv

    def neighbors(self, v: int) -> list[int]:
        return self._adj[v]

    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self._adj], dtype=np.int64)

    def has_edge(self, v: int, w: int) -> bool:
        return w in self._adj[v]

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        pairs = [(u, w) for u in range(self._nv) for w in self._adj[u] if u < w]
        if not pairs:
            return np.empty(0, np.int64), np.empty(0, np.int64)
        a = np.array(pairs, dtype=np.int64)
        return a[:, 0], a[:, 1]


def adjacency_lists(graph) -> list[list[int]]:
    return [list(graph.neighbors(v)) for v in range(graph.num_vertices)]


def induced_subgraph(graph, keep) -> tuple[SimpleGraph, np.ndarray]:
    """Subgraph induced on the vertices where ``keep`` is true.

    Returns the relabelled graph and the original ids of its vertices.
    """
    keep = np.asarray(keep, dtype=bool)
    ids = np.flatnonzero(keep)
    relabel = -np.ones(graph.num_vertices, dtype=np.int64)
    relabel[ids] = np.arange(len(ids))
    u, w = graph.edge_arrays()
    sel = keep[u] & keep[w]
    return SimpleGraph(len(ids), zip(relabel[u[sel]], relabel[w[sel]])), ids
