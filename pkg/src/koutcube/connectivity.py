"""Connectivity-grade analyses of k-out samples.

Vertex connectivity is computed exactly by Menger's theorem: unit-capacity
max-flow on the vertex-split network, over the pairs that suffice for the
Esfahanian-Hakimi argument. Small vertex cuts are found by a bounded search
tree, and subcubes that form whole components are detected by masking.
"""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import BudgetError
from .graph import CubeSubgraph, adjacency_lists
from .hypercube import InvalidSpecError, SubcubeSpec, popcount, subcube_outer_boundary, subcube_vertices
from .sampler import (
    ChoiceSample,
    FunctionalMap,
    KOutSample,
    _subset_of_allowed,
    as_undirected,
    sample_kout,
)
from .seeding import as_seed
from .structure import components

MAX_FLOW_VERTICES = 4096
MAX_ACTIVE_CAP = 12
DEFAULT_ACTIVE_CAP = 8
_PLANT = 5


def _undirected(obj):
    if isinstance(obj, (ChoiceSample, FunctionalMap)):
        return as_undirected(obj)
    return obj


def k0(n: int) -> float:
    """``log2(n) - 2*log2(log2(n))`` in double precision; needs ``n >= 2``."""
    if n < 2:
        raise ValueError("the threshold is defined for n >= 2")
    return math.log2(n) - 2.0 * math.log2(math.log2(n))


def k1(n: int) -> int:
    """``ceil(k0(n)) + 1``, the smallest k covered by the k-connectivity statement."""
    return math.ceil(k0(n)) + 1


def is_connected(graph) -> bool:
    return components(graph).count == 1


def degree_census(sample, k: int | None = None) -> tuple[dict[int, int], int]:
    """Histogram of undirected degrees and the number of vertices of degree exactly ``k``."""
    if k is None:
        k = getattr(sample, "k", None)
    deg = _undirected(sample).degrees()
    hist = dict(sorted(Counter(deg.tolist()).items()))
    return hist, hist.get(k, 0) if k is not None else 0


def degree_k_probability(n: int, k: int) -> float:
    """``(1 - k/n) ** (n - k)``: none of the unchosen edges is picked from the other side."""
    return (1.0 - k / n) ** (n - k)


class _SplitNetwork:
    """Vertex-split unit-capacity flow network; vertex ``x`` becomes ``2x -> 2x+1``."""

    def __init__(self, adj: list[list[int]]):
        nv = len(adj)
        self.size = 2 * nv
        head = [[] for _ in range(self.size)]
        to, cap = [], []

        def add(u, w):
            head[u].append(len(to))
            to.append(w)
            cap.append(1)
            head[w].append(len(to))
            to.append(u)
            cap.append(0)

        for x in range(nv):
            add(2 * x, 2 * x + 1)
        for x in range(nv):
            for y in adj[x]:
                add(2 * x + 1, 2 * y)
        self.head = head
        self.to = to
        self.base_cap = cap

    def local_connectivity(self, s: int, t: int, limit: int) -> int:
        """Internally disjoint s-t paths for non-adjacent ``s, t``, stopping at ``limit``."""
        source, sink = 2 * s + 1, 2 * t
        cap = list(self.base_cap)
        head, to = self.head, self.to
        flow = 0
        while flow < limit:
            level = [-1] * self.size
            level[source] = 0
            q = deque([source])
            while q and level[sink] < 0:
                u = q.popleft()
                for e in head[u]:
                    w = to[e]
                    if cap[e] and level[w] < 0:
                        level[w] = level[u] + 1
                        q.append(w)
            if level[sink] < 0:
                break
            it = [0] * self.size
            # blocking flow by iterative DFS on the level graph
            while flow < limit:
                path = []
                u = source
                while u != sink:
                    edges = head[u]
                    while it[u] < len(edges):
                        e = edges[it[u]]
                        w = to[e]
                        if cap[e] and level[w] == level[u] + 1:
                            break
                        it[u] += 1
                    if it[u] == len(edges):
                        if not path:
                            break
                        level[u] = -1
                        e = path.pop()
                        u = to[e ^ 1]
                        it[u] += 1
                        continue
                    e = edges[it[u]]
                    path.append(e)
                    u = to[e]
                if u != sink:
                    break
                for e in path:
                    cap[e] -= 1
                    cap[e ^ 1] += 1
                flow += 1
        return flow


def vertex_connectivity(graph, ceiling: int | None = None, max_vertices: int = MAX_FLOW_VERTICES) -> int:
    """Exact vertex connectivity, or ``ceiling`` once that much is certified.

    A disconnected graph has connectivity 0 and a complete graph on ``m``
    vertices has ``m - 1``.
    """
    graph = _undirected(graph)
    nv = graph.num_vertices
    if nv > max_vertices:
        raise BudgetError(f"vertex connectivity is capped at {max_vertices} vertices, got {nv}")
    if ceiling is None:
        ceiling = nv
    if nv <= 1 or ceiling <= 0:
        return 0
    adj = adjacency_lists(graph)
    deg = [len(a) for a in adj]
    if min(deg) == nv - 1:
        return min(nv - 1, ceiling)
    if components(graph).count > 1:
        return 0
    best = min(min(deg), ceiling)
    net = _SplitNetwork(adj)
    v = min(range(nv), key=lambda x: (deg[x], x))
    near = set(adj[v])
    for w in range(nv):
        if w == v or w in near:
            continue
        best = min(best, net.local_connectivity(v, w, best))
        if best == 0:
            return 0
    for x, y in combinations(sorted(near), 2):
        if y in adj[x]:
            continue
        best = min(best, net.local_connectivity(x, y, best))
    return best


def vertex_connectivity_bruteforce(graph) -> int:
    """Smallest vertex set whose removal disconnects the graph, by exhaustive search."""
    graph = _undirected(graph)
    nv = graph.num_vertices
    adj = adjacency_lists(graph)

    def connected_without(removed: set) -> bool:
        rest = [x for x in range(nv) if x not in removed]
        seen = {rest[0]}
        stack = [rest[0]]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in removed and y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(rest)

    for r in range(nv - 1):
        for X in combinations(range(nv), r):
            if not connected_without(set(X)):
                return r
    return max(nv - 1, 0)


@dataclass
class DisconnectionCensus:
    """Components of the graph after deleting ``L``; these are exactly the minimal L-disconnected sets."""

    L: tuple[int, ...]
    sets: list[np.ndarray]

    @property
    def sizes(self) -> list[int]:
        return [len(s) for s in self.sets]

    def smallest(self) -> np.ndarray | None:
        return min(self.sets, key=len) if self.sets else None


def _labels_without(graph, removed: np.ndarray) -> np.ndarray:
    nv = graph.num_vertices
    u, w = graph.edge_arrays()
    keep = ~(removed[u] | removed[w])
    mat = coo_matrix((np.ones(int(keep.sum()), np.int8), (u[keep], w[keep])), shape=(nv, nv)).tocsr()
    _, labels = connected_components(mat, directed=False)
    return labels


def minimal_disconnected_sets(sample, L) -> DisconnectionCensus:
    graph = _undirected(sample)
    nv = graph.num_vertices
    L = tuple(sorted({int(x) for x in L}))
    removed = np.zeros(nv, dtype=bool)
    removed[list(L)] = True
    labels = _labels_without(graph, removed)
    labels = np.where(removed, -1, labels)
    order = np.argsort(labels, kind="stable")
    order = order[labels[order] >= 0]
    cuts = np.flatnonzero(np.diff(labels[order])) + 1
    sets = sorted(np.split(order, cuts), key=lambda s: s[0]) if len(order) else []
    census = DisconnectionCensus(L, sets)
    _check_partition(graph, census, removed)
    return census


def _check_partition(graph, census: DisconnectionCensus, removed: np.ndarray) -> None:
    owner = np.full(graph.num_vertices, -1, dtype=np.int64)
    for i, S in enumerate(census.sets):
        if np.any(owner[S] >= 0):
            raise AssertionError("minimal disconnected sets overlap")
        owner[S] = i
    if np.any((owner < 0) & ~removed):
        raise AssertionError("sets and L do not cover the vertex set")
    u, w = graph.edge_arrays()
    live = (owner[u] >= 0) & (owner[w] >= 0)
    if np.any(owner[u][live] != owner[w][live]):
        raise AssertionError("an edge leaves a minimal disconnected set outside L")


@dataclass
class ActiveSetReport:
    """Vertices lying in a small set that at most ``k - 1`` vertices cut off in ``G0``.

    ``witnesses[v] = (S, L)`` with ``v in S``, ``|S| <= cap``, ``|L| = k - 1``
    and ``S`` a component of ``G0 - L``.
    """

    active: np.ndarray
    cap: int
    k: int
    witnesses: dict[int, tuple[tuple[int, ...], tuple[int, ...]]] = field(repr=False)

    @property
    def size(self) -> int:
        return int(self.active.sum())


def _small_cut_witness(adj, v: int, budget: int, cap: int):
    """Connected ``S`` containing ``v`` with ``|S| <= cap`` and at most ``budget`` boundary vertices."""

    def boundary(S):
        out = set()
        for x in S:
            out.update(adj[x])
        return out - S

    def search(S, marked):
        nb = boundary(S)
        if len(nb) <= budget:
            return S, nb
        u = min(nb - marked)
        if len(S) < cap:
            found = search(S | {u}, marked)
            if found:
                return found
        if len(marked) < budget:
            return search(S, marked | {u})
        return None

    return search(frozenset([v]), frozenset())


def active_set(g0: KOutSample, cap: int = DEFAULT_ACTIVE_CAP, k: int | None = None) -> ActiveSetReport:
    """Active vertices of ``G0`` under a size cap in place of the asymptotic bound.

    ``k`` defaults to ``g0.k + 1``. A vertex is active iff some connected set
    of at most ``cap`` vertices containing it has a ``G0`` vertex boundary of
    at most ``k - 1`` vertices.
    """
    if cap > MAX_ACTIVE_CAP:
        raise BudgetError(f"active-set cap is limited to {MAX_ACTIVE_CAP}")
    if k is None:
        k = g0.k + 1
    graph = _undirected(g0)
    nv = graph.num_vertices
    adj = [set(a) for a in adjacency_lists(graph)]
    active = np.zeros(nv, dtype=bool)
    witnesses = {}
    for v in range(nv):
        if active[v]:
            continue
        found = _small_cut_witness(adj, v, k - 1, cap)
        if not found:
            continue
        S, nb = found
        pad = (x for x in range(nv) if x not in S and x not in nb)
        L = sorted(nb)
        while len(L) < k - 1:
            try:
                L.append(next(pad))
            except StopIteration:
                break
        wit = (tuple(sorted(S)), tuple(sorted(L)))
        for x in S:
            if not active[x]:
                active[x] = True
                witnesses[x] = wit
    return ActiveSetReport(active, cap, k, witnesses)


def active_predicate(cap: int = DEFAULT_ACTIVE_CAP):
    """Predicate for :func:`koutcube.sampler.staged_sample` marking the capped active set."""

    def predicate(g0):
        return active_set(g0, cap).active

    return predicate


def verify_witness(g0, S, L) -> bool:
    census = minimal_disconnected_sets(g0, L)
    target = np.array(sorted(S))
    return any(len(s) == len(target) and np.array_equal(np.sort(s), target) for s in census.sets)


def subcube_component_scan(sample) -> list[SubcubeSpec]:
    """Proper subcubes that form whole components, every member's edges kept inside."""
    graph = _undirected(sample)
    n = graph.n
    full = (1 << n) - 1
    summary = components(graph)
    labels = summary.labels
    sizes = np.bincount(labels)
    order = np.argsort(labels, kind="stable")
    starts = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    verts = order.astype(np.int64)
    ones = np.bitwise_and.reduceat(verts, starts)
    zeros = np.bitwise_and.reduceat(~verts & full, starts)
    masks = sample.choices if isinstance(sample, ChoiceSample) else graph.adj
    specs = []
    for lab in range(len(sizes)):
        size = int(sizes[lab])
        # the whole cube is trivially a subcube; only proper ones are reported
        if size & (size - 1) or size == full + 1:
            continue
        forced = popcount(int(ones[lab])) + popcount(int(zeros[lab]))
        if 1 << (n - forced) != size:
            continue
        free_mask = full & ~int(ones[lab]) & ~int(zeros[lab])
        members = verts[starts[lab]:starts[lab] + size]
        if np.any(masks[members].astype(np.int64) & ~free_mask):
            continue
        spec = SubcubeSpec(
            ones=frozenset(i for i in range(n) if ones[lab] >> i & 1),
            free=frozenset(i for i in range(n) if free_mask >> i & 1),
            zeros=frozenset(i for i in range(n) if zeros[lab] >> i & 1),
        )
        specs.append((int(members.min()), spec))
    return [s for _, s in sorted(specs, key=lambda t: t[0])]


def plant_subcube_component(n: int, k: int, spec: SubcubeSpec, seed=0) -> KOutSample:
    """A k-out sample conditioned on ``spec`` spanning a whole component.

    Subcube vertices choose exactly their ``k`` internal directions; each
    outer-boundary vertex draws its ``k`` choices uniformly from its ``n - 1``
    directions that do not point into the subcube. Everything else is an
    ordinary k-out draw.
    """
    spec.validate(n)
    if spec.dim != k:
        raise InvalidSpecError(f"planted subcube must have {k} free coordinates, got {spec.dim}")
    seed = as_seed(seed)
    sample = sample_kout(n, k, seed.child(_PLANT, 0))
    choices = sample.choices.copy()
    inside = subcube_vertices(spec, n)
    choices[inside] = np.uint32(spec.free_mask)
    outer = subcube_outer_boundary(spec, n)
    if len(outer):
        fixed = ((1 << n) - 1) & ~spec.free_mask
        inward = (outer ^ spec.ones_mask) & fixed
        allowed = (np.uint32((1 << n) - 1) & ~inward.astype(np.uint32)).astype(np.uint32)
        choices[outer] = _subset_of_allowed(seed.key(_PLANT, 1), outer, allowed, k, n, 0)
    return KOutSample(n, choices, seed, k=k)
