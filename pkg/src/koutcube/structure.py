"""Component census, functional-digraph cycle structure and orbit statistics."""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import BudgetError
from .graph import CubeSubgraph
from .hypercube import neighbors, popcount
from .sampler import ChoiceSample, FunctionalMap, as_undirected


def _graph(obj):
    if isinstance(obj, (ChoiceSample, FunctionalMap)):
        return as_undirected(obj)
    return obj


@dataclass
class ComponentSummary:
    sizes: np.ndarray
    labels: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.sizes = np.sort(np.asarray(self.sizes, dtype=np.int64))[::-1]

    @property
    def num_vertices(self) -> int:
        return int(self.sizes.sum())

    @property
    def count(self) -> int:
        return len(self.sizes)

    @property
    def giant_fraction(self) -> float:
        return float(self.sizes[0]) / self.num_vertices if self.count else 0.0

    @property
    def second_fraction(self) -> float:
        return float(self.sizes[1]) / self.num_vertices if self.count > 1 else 0.0

    def histogram(self) -> dict[int, int]:
        return dict(sorted(Counter(self.sizes.tolist()).items()))


class UnionFind:
    """Disjoint sets over ``range(size)`` with path halving and union by size."""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.size = [1] * size

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True

    def labels(self) -> np.ndarray:
        """Component label per element, numbered by smallest member."""
        roots = [self.find(x) for x in range(len(self.parent))]
        first: dict[int, int] = {}
        return np.array([first.setdefault(r, len(first)) for r in roots], dtype=np.int64)


def _csr_from_masks(n: int, masks: np.ndarray) -> csr_matrix:
    """Row ``v`` lists ``v ^ (1 << d)`` for each set bit ``d`` of ``masks[v]``.

    Rows come out sorted, so no COO conversion is needed. The matrix may be
    asymmetric; callers treat it as undirected.
    """
    nv = 1 << n
    shifts = np.arange(n, dtype=np.uint32)
    step = max(1, (1 << 22) // n)
    parts = []
    for start in range(0, nv, step):
        block = masks[start:start + step]
        rows, dirs = np.nonzero((block[:, None] >> shifts) & np.uint32(1))
        parts.append((rows + start) ^ (np.int64(1) << dirs))
    indices = np.concatenate(parts).astype(np.int32)
    indptr = np.zeros(nv + 1, dtype=np.int64)
    np.cumsum(popcount(masks), out=indptr[1:])
    return csr_matrix((np.ones(len(indices), np.int8), indices, indptr), shape=(nv, nv))


def _labels_scipy(graph) -> np.ndarray:
    nv = graph.num_vertices
    if isinstance(graph, (ChoiceSample, CubeSubgraph)):
        masks = graph.choices if isinstance(graph, ChoiceSample) else graph.adj
        mat = _csr_from_masks(graph.n, masks)
    elif isinstance(graph, FunctionalMap):
        indptr = np.arange(nv + 1, dtype=np.int64)
        mat = csr_matrix((np.ones(nv, np.int8), graph.f().astype(np.int32), indptr), shape=(nv, nv))
    else:
        u, w = graph.edge_arrays()
        mat = coo_matrix((np.ones(len(u), dtype=np.int8), (u, w)), shape=(nv, nv)).tocsr()
    _, labels = connected_components(mat, directed=False)
    return labels


def _labels_union_find(graph) -> np.ndarray:
    uf = UnionFind(graph.num_vertices)
    u, w = graph.edge_arrays()
    for a, b in zip(u.tolist(), w.tolist()):
        uf.union(a, b)
    return uf.labels()


def _labels_bfs(graph) -> np.ndarray:
    nv = graph.num_vertices
    labels = np.full(nv, -1, dtype=np.int64)
    current = 0
    for s in range(nv):
        if labels[s] >= 0:
            continue
        labels[s] = current
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in graph.neighbors(x):
                if labels[y] < 0:
                    labels[y] = current
                    queue.append(y)
        current += 1
    return labels


_METHODS = {"scipy": _labels_scipy, "union_find": _labels_union_find, "bfs": _labels_bfs}


def components(graph, method: str = "scipy") -> ComponentSummary:
    """Exact connected components of an undirected view.

    ``method`` selects the engine: ``"scipy"`` (compiled, default),
    ``"union_find"`` or ``"bfs"`` (pure Python, for cross-checks).
    """
    if method != "scipy":
        graph = _graph(graph)
    labels = _METHODS[method](graph)
    sizes = np.bincount(labels) if len(labels) else np.empty(0, np.int64)
    return ComponentSummary(sizes, labels)


def pair_statistic(summary: ComponentSummary) -> int:
    """Sum of squared component sizes, i.e. ordered same-component pairs with repeats.

    The count of unordered distinct pairs is ``(Z' - 2**n) / 2``; see
    :func:`pair_count`. The largest size squared never exceeds the result.
    """
    return int(sum(int(s) * int(s) for s in summary.sizes))


def pair_count(summary: ComponentSummary) -> int:
    return int(sum(int(s) * (int(s) - 1) // 2 for s in summary.sizes))


@dataclass
class CycleCensus:
    counts: dict[int, int]
    max_tail: int
    on_cycle: np.ndarray = field(repr=False, default=None)

    @property
    def two_cycles(self) -> int:
        return self.counts.get(2, 0)

    @property
    def longer(self) -> int:
        return sum(c for length, c in self.counts.items() if length > 2)

    @property
    def num_cycles(self) -> int:
        return sum(self.counts.values())

    def vertices_on(self, length: int) -> int:
        return length * self.counts.get(length, 0)


def _census_peel(fmap: FunctionalMap) -> CycleCensus:
    f = fmap.f()
    nv = len(f)
    indeg = np.bincount(f, minlength=nv)
    alive = np.ones(nv, dtype=bool)
    frontier = np.flatnonzero(indeg == 0)
    rounds = 0
    # every removed vertex had in-degree zero, so the rounds equal the longest tail
    while len(frontier):
        rounds += 1
        alive[frontier] = False
        targets = f[frontier]
        np.subtract.at(indeg, targets, 1)
        frontier = np.unique(targets[indeg[targets] == 0])
    cyc = np.flatnonzero(alive)
    mat = coo_matrix((np.ones(len(cyc), np.int8), (cyc, f[cyc])), shape=(nv, nv)).tocsr()
    _, labels = connected_components(mat, directed=False)
    lengths = np.bincount(labels[cyc])
    lengths = lengths[lengths > 0]
    counts = dict(sorted(Counter(lengths.tolist()).items()))
    return CycleCensus(counts, rounds, alive)


def _census_walk(fmap: FunctionalMap) -> CycleCensus:
    f = fmap.f().tolist()
    nv = len(f)
    state = [0] * nv  # 0 unvisited, 1 on the current walk, 2 finished
    depth = [0] * nv  # steps to reach a cycle, for finished vertices
    walk_pos: dict[int, int] = {}
    on_cycle = np.zeros(nv, dtype=bool)
    counts: Counter = Counter()
    for start in range(nv):
        if state[start]:
            continue
        path = []
        x = start
        while state[x] == 0:
            state[x] = 1
            walk_pos[x] = len(path)
            path.append(x)
            x = f[x]
        if state[x] == 1:
            i = walk_pos[x]
            cycle = path[i:]
            counts[len(cycle)] += 1
            for c in cycle:
                on_cycle[c] = True
                depth[c] = 0
            tail = path[:i]
            base = 0
        else:
            tail = path
            base = depth[x]
        for j, y in enumerate(reversed(tail), start=1):
            depth[y] = base + j
        for y in path:
            state[y] = 2
        walk_pos.clear()
    return CycleCensus(dict(sorted(counts.items())), max(depth) if nv else 0, on_cycle)


def cycle_census(fmap: FunctionalMap, method: str = "peel", verify: bool = True) -> CycleCensus:
    """Cycles and tails of the 1-out digraph.

    ``"peel"`` strips in-degree-zero vertices in rounds (vectorised);
    ``"walk"`` follows orbits with three-state colouring. With ``verify`` the
    cycle count is checked against the component count of the undirected view,
    since each component of a functional graph holds exactly one cycle.
    """
    census = _census_peel(fmap) if method == "peel" else _census_walk(fmap)
    if verify:
        ncomp = components(fmap).count
        if ncomp != census.num_cycles:
            raise AssertionError(f"{census.num_cycles} cycles but {ncomp} components")
    return census


@dataclass
class TrajectoryView:
    orbit: list[int]
    steps: list[int]
    lsize: list[int]

    @property
    def first_repeat(self) -> int | None:
        """Index of the first orbit element equal to an earlier one."""
        seen = set()
        for i, x in enumerate(self.orbit):
            if x in seen:
                return i
            seen.add(x)
        return None


def trajectory(fmap: FunctionalMap, v: int, max_steps: int) -> TrajectoryView:
    """Orbit ``v, f(v), ...`` with the flipped coordinate and Hamming distance to ``v`` per step.

    ``steps[i]`` is the coordinate flipped going from ``f^i(v)`` to ``f^(i+1)(v)``;
    ``lsize[i]`` is ``|v xor f^i(v)|``.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    dirs = fmap.dir
    orbit = [int(v)]
    steps = []
    x = int(v)
    for _ in range(max_steps):
        d = int(dirs[x])
        steps.append(d)
        x ^= 1 << d
        orbit.append(x)
    lsize = [popcount(v ^ y) for y in orbit]
    return TrajectoryView(orbit, steps, lsize)


CONNECTED_SET_BUDGET = (4, 6)


def connected_set_bound(n: int, s: int) -> float:
    return (math.e * n) ** s


def count_connected_sets(n: int, v: int, s: int) -> int:
    """Exact number of ``s``-sets containing ``v`` that induce a connected subgraph of the cube."""
    max_n, max_s = CONNECTED_SET_BUDGET
    if n > max_n or s > max_s:
        raise BudgetError(f"exhaustive enumeration is limited to n <= {max_n}, s <= {max_s}")
    if s < 1:
        raise ValueError("set size must be positive")
    level = {frozenset([v])}
    for _ in range(s - 1):
        nxt = set()
        for S in level:
            for x in S:
                for y in neighbors(x, n):
                    if y not in S:
                        nxt.add(S | {y})
        level = nxt
    count = len(level)
    if count > connected_set_bound(n, s):
        raise AssertionError(f"{count} connected sets exceed (en)^s")
    return count
