"""Deterministic combinatorics of the n-cube.

Vertices are integers in ``[0, 2**n)``; coordinate ``i`` is bit ``i``, so the
neighbour across direction ``d`` is ``v ^ (1 << d)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

MAX_DIMENSION = 30
# dense-set operations materialise a 2**n membership mask
MAX_DENSE_DIMENSION = 26


class InvalidSpecError(ValueError):
    """A subcube specification does not partition the coordinates."""


def check_dimension(n: int) -> int:
    n = int(n)
    if not 1 <= n <= MAX_DIMENSION:
        raise ValueError(f"dimension must lie in [1, {MAX_DIMENSION}], got {n}")
    return n


def num_vertices(n: int) -> int:
    return 1 << n


def neighbors(v: int, n: int) -> list[int]:
    """The ``n`` vertices adjacent to ``v``, in direction order."""
    return [v ^ (1 << i) for i in range(n)]


def popcount(x):
    """Bit count of an int or an unsigned integer array."""
    if isinstance(x, (int, np.integer)):
        return int(x).bit_count()
    return np.bitwise_count(np.asarray(x)).astype(np.int64)


def parity_class(v):
    """0 for even-weight vertices, 1 for odd-weight ones."""
    return popcount(v) % 2


def _membership(vertices: Iterable[int], n: int) -> np.ndarray:
    if n > MAX_DENSE_DIMENSION:
        raise ValueError(f"dense vertex sets are capped at n={MAX_DENSE_DIMENSION}")
    mask = np.zeros(1 << n, dtype=bool)
    idx = np.fromiter(vertices, dtype=np.int64) if not isinstance(vertices, np.ndarray) else vertices
    mask[np.asarray(idx, dtype=np.int64)] = True
    return mask


def edge_count(A, B, n: int) -> int:
    """Number of cube edges with one end in ``A`` and the other in ``B``.

    Each unordered edge is counted once, so ``edge_count(A, A, n)`` is the
    number of edges inside ``A`` and ``edge_count(A, V - A, n)`` is the edge
    boundary of ``A``. For overlapping ``A`` and ``B`` an edge ``vw`` counts
    once if either orientation (v in A, w in B) holds. The handshake identity
    ``d(A, V - A) = n|A| - 2 d(A, A)`` follows.
    """
    a = _membership(A, n)
    b = _membership(B, n)
    ids = np.arange(1 << n, dtype=np.int64)
    total = 0
    for d in range(n):
        low = ids[(ids >> d) & 1 == 0]
        high = low | (1 << d)
        hit = (a[low] & b[high]) | (a[high] & b[low])
        total += int(np.count_nonzero(hit))
    return total


def boundary_size(A, n: int) -> int:
    """Edge boundary ``d(A, V - A)``."""
    a = _membership(A, n)
    ids = np.arange(1 << n, dtype=np.int64)
    total = 0
    for d in range(n):
        total += int(np.count_nonzero(a & ~a[ids ^ (1 << d)]))
    return total


def iso_lower_bound(n: int, s: float) -> float:
    """``n*s - s*log2(s)``, the lower bound on the edge boundary of an ``s``-set."""
    if s < 1 or s > (1 << n):
        raise ValueError(f"set size must lie in [1, 2**n], got {s}")
    return n * s - s * math.log2(s)


def iso_interval_bound(n: int, a: float, b: float) -> float:
    """Boundary bound valid for every set whose size lies in ``[a, b]``.

    ``x -> n*x - x*log2(x)`` is concave, so its minimum over an interval is
    attained at an endpoint.
    """
    if a > b:
        raise ValueError("empty interval")
    return min(iso_lower_bound(n, a), iso_lower_bound(n, b))


def satisfies_iso(boundary: int, n: int, s: int, slack: float = 1e-9) -> bool:
    """Integer boundary against the bound, tolerant of equality cases."""
    return boundary >= math.floor(iso_lower_bound(n, s) - slack)


def canonical_edge(v: int, w: int) -> tuple[int, int]:
    """``(base, direction)`` of the cube edge ``vw``; bit ``direction`` of base is 0."""
    x = v ^ w
    if x == 0 or x & (x - 1):
        raise ValueError(f"{v} and {w} are not adjacent")
    d = x.bit_length() - 1
    return min(v, w), d


@dataclass(frozen=True)
class SubcubeSpec:
    """A subcube: ``ones`` forced to 1, ``zeros`` forced to 0, ``free`` unconstrained.

    ``len(ones)`` is the level at which the subcube lies.
    """

    ones: frozenset
    free: frozenset
    zeros: frozenset

    @classmethod
    def from_sets(cls, n: int, free, ones=()) -> "SubcubeSpec":
        free = frozenset(int(i) for i in free)
        ones = frozenset(int(i) for i in ones)
        zeros = frozenset(range(n)) - free - ones
        spec = cls(ones=ones, free=free, zeros=zeros)
        spec.validate(n)
        return spec

    @property
    def level(self) -> int:
        return len(self.ones)

    @property
    def dim(self) -> int:
        return len(self.free)

    def validate(self, n: int) -> None:
        parts = (self.ones, self.free, self.zeros)
        if any(i < 0 or i >= n for p in parts for i in p):
            raise InvalidSpecError(f"coordinate outside [0, {n})")
        if sum(len(p) for p in parts) != n or len(self.ones | self.free | self.zeros) != n:
            raise InvalidSpecError("ones, free and zeros must partition the coordinates")

    @property
    def ones_mask(self) -> int:
        return sum(1 << i for i in self.ones)

    @property
    def free_mask(self) -> int:
        return sum(1 << i for i in self.free)

    def contains(self, v: int) -> bool:
        fixed = ~self.free_mask
        return (v & fixed) == (self.ones_mask & fixed)


def subcube_vertices(spec: SubcubeSpec, n: int) -> np.ndarray:
    """Sorted vertex ids of the subcube, ``2**len(free)`` of them."""
    spec.validate(n)
    vs = np.array([spec.ones_mask], dtype=np.int64)
    for i in sorted(spec.free):
        vs = np.concatenate([vs, vs | (1 << i)])
    return np.sort(vs)


def subcube_outer_boundary(spec: SubcubeSpec, n: int) -> np.ndarray:
    """Vertices outside the subcube with a neighbour inside it.

    Each such vertex differs from the subcube in exactly one fixed coordinate,
    so it has exactly one neighbour inside; there are ``2**|free| * (n - |free|)``.
    """
    inside = subcube_vertices(spec, n)
    fixed = [i for i in range(n) if i not in spec.free]
    out = np.concatenate([inside ^ (1 << i) for i in fixed]) if fixed else np.empty(0, np.int64)
    return np.sort(out)


def _all_subset_boundaries(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Sizes and edge boundaries of every subset of the n-cube, indexed by bitmask."""
    nv = 1 << n
    subsets = np.arange(1 << nv, dtype=np.int64)
    member = [(subsets >> v) & 1 for v in range(nv)]
    size = np.sum(member, axis=0)
    bnd = np.zeros(len(subsets), dtype=np.int64)
    for v in range(nv):
        for d in range(n):
            bnd += member[v] & (1 - member[v ^ (1 << d)])
    return size, bnd


def iso_check(n: int, samples: int = 10_000, seed: int = 0) -> dict:
    """Compare edge boundaries with the isoperimetric bound.

    Exhaustive over all subsets for ``n <= 4``; otherwise ``samples`` sets,
    a quarter of them random subcubes (which attain the bound) and the rest
    uniform random subsets of log-uniformly drawn sizes.
    """
    n = check_dimension(n)
    if n <= 4:
        size, bnd = _all_subset_boundaries(n)
        keep = size > 0
        size, bnd = size[keep], bnd[keep]
        bound = n * size - size * np.log2(size)
        ok = bnd >= np.floor(bound - 1e-9)
        tight = np.isclose(bnd, bound, atol=1e-9)
        return {"n": n, "mode": "exhaustive", "sets": int(len(size)),
                "violations": int(np.count_nonzero(~ok)), "tight": int(np.count_nonzero(tight))}
    from .seeding import as_seed

    rng = np.random.default_rng(as_seed(seed).key(0x150))
    nv = 1 << n
    violations = tight = 0
    for i in range(samples):
        if i % 4 == 0:
            dim = int(rng.integers(0, n + 1))
            free = rng.choice(n, size=dim, replace=False)
            rest = [c for c in range(n) if c not in set(free.tolist())]
            ones = [c for c in rest if rng.random() < 0.5]
            A = subcube_vertices(SubcubeSpec.from_sets(n, free, ones), n)
        else:
            s = int(np.clip(round(2 ** rng.uniform(0, n)), 1, nv))
            A = rng.choice(nv, size=s, replace=False)
        b = boundary_size(A, n)
        bound = iso_lower_bound(n, len(A))
        violations += not satisfies_iso(b, n, len(A))
        tight += abs(b - bound) < 1e-9
    return {"n": n, "mode": "sampled", "sets": samples, "violations": violations, "tight": tight}
