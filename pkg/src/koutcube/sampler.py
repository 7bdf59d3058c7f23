"""Random generation for the k-out model on the n-cube.

Each vertex's choices are stored as a bitmask over the ``n`` directions. All
randomness comes from :mod:`koutcube.seeding`, so a vertex's draws depend
only on the seed and the vertex id, never on generation order.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .graph import CubeSubgraph
from .hypercube import check_dimension, parity_class, popcount
from .seeding import Seed, as_seed, uniform_ints

CHUNK = 1 << 20

# stream tags, keep stable: they are part of the reproducibility contract
_KOUT, _ONE_OUT, _EXTEND, _STAGED, _PLANT = 1, 2, 3, 4, 5

DUMP_MAGIC = b"KOUTCUBE"
_HEADER = struct.Struct("<8sIIQQ")


class NoRoomError(ValueError):
    """A vertex has already chosen every direction."""


def _chunks(size: int):
    for start in range(0, size, CHUNK):
        yield np.arange(start, min(start + CHUNK, size), dtype=np.int64)


def _nth_set_bit(mask: np.ndarray, rank: np.ndarray, n: int) -> np.ndarray:
    """Index of the ``rank``-th (0-based) set bit of each mask."""
    out = np.full(mask.shape, -1, dtype=np.int64)
    seen = np.zeros(mask.shape, dtype=np.int64)
    for d in range(n):
        bit = ((mask >> np.uint32(d)) & 1).astype(bool)
        out[bit & (seen == rank)] = d
        seen += bit
    return out


def _floyd_positions(key: int, verts: np.ndarray, m, k: int, slot0: int) -> np.ndarray:
    """Uniform k-subsets of ``[0, m)`` (``m`` scalar or per vertex) by Floyd's algorithm."""
    m = np.broadcast_to(np.asarray(m, dtype=np.int64), verts.shape)
    out = np.zeros(verts.shape, dtype=np.uint32)
    one = np.uint32(1)
    for i in range(k):
        j = m - k + i
        t = uniform_ints(key, verts, slot0 + i, j + 1)
        taken = ((out >> t.astype(np.uint32)) & one).astype(bool)
        pick = np.where(taken, j, t).astype(np.uint32)
        out |= one << pick
    return out


def _subset_of_allowed(key, verts, allowed: np.ndarray, k: int, n: int, slot0: int) -> np.ndarray:
    """Uniform k-subset of the set bits of ``allowed`` (per vertex)."""
    m = popcount(allowed)
    pos = _floyd_positions(key, verts, m, k, slot0)
    out = np.zeros(verts.shape, dtype=np.uint32)
    seen = np.zeros(verts.shape, dtype=np.int64)
    for d in range(n):
        bit = ((allowed >> np.uint32(d)) & 1).astype(bool)
        chosen = bit & (((pos >> seen.astype(np.uint32)) & 1).astype(bool))
        out[chosen] |= np.uint32(1 << d)
        seen += bit
    return out


@dataclass
class ChoiceSample:
    """Per-vertex direction choices; the graph is their union, orientation ignored."""

    n: int
    choices: np.ndarray
    seed: Seed = field(default_factory=lambda: Seed(0))

    def __post_init__(self):
        self.choices = np.asarray(self.choices, dtype=np.uint32)
        if self.choices.shape != (1 << self.n,):
            raise ValueError("choices must have 2**n entries")

    @property
    def num_vertices(self) -> int:
        return 1 << self.n

    def choice_counts(self) -> np.ndarray:
        return popcount(self.choices)

    def as_undirected(self) -> CubeSubgraph:
        return as_undirected(self)

    def as_kout(self) -> "KOutSample":
        counts = self.choice_counts()
        k = int(counts[0])
        if not np.all(counts == k):
            raise ValueError("vertices hold different numbers of choices")
        return KOutSample(self.n, self.choices, self.seed, k=k)

    def __eq__(self, other):
        return (
            isinstance(other, ChoiceSample)
            and self.n == other.n
            and np.array_equal(self.choices, other.choices)
        )


@dataclass(eq=False)
class KOutSample(ChoiceSample):
    k: int = 1

    def validate(self) -> None:
        if not 1 <= self.k <= self.n:
            raise ValueError(f"k must lie in [1, n], got k={self.k}, n={self.n}")
        if not np.all(self.choice_counts() == self.k):
            raise ValueError("every vertex must choose exactly k directions")

    def to_bytes(self) -> bytes:
        buf = io.BytesIO()
        write_sample(self, buf)
        return buf.getvalue()


def as_undirected(sample) -> CubeSubgraph:
    """Edge present iff chosen by at least one endpoint; mutual picks give one edge."""
    if isinstance(sample, CubeSubgraph):
        return sample
    if isinstance(sample, FunctionalMap):
        sample = sample.as_choices()
    ch = sample.choices
    n = sample.n
    adj = ch.copy()
    ids = np.arange(1 << n, dtype=np.int64)
    for d in range(n):
        incoming = (ch[ids ^ (1 << d)] >> np.uint32(d)) & np.uint32(1)
        adj |= incoming << np.uint32(d)
    return CubeSubgraph(n, adj)


def sample_kout(n: int, k: int, seed=0) -> KOutSample:
    """Every vertex independently picks a uniform k-subset of its n directions."""
    n = check_dimension(n)
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, n], got k={k}, n={n}")
    seed = as_seed(seed)
    key = seed.key(_KOUT, n, k)
    choices = np.empty(1 << n, dtype=np.uint32)
    for verts in _chunks(1 << n):
        choices[verts] = _floyd_positions(key, verts, n, k, 0)
    return KOutSample(n, choices, seed, k=k)


@dataclass
class FunctionalMap:
    """The 1-out digraph: vertex ``v`` points to ``v ^ (1 << dir[v])``."""

    n: int
    dir: np.ndarray
    seed: Seed = field(default_factory=lambda: Seed(0))

    def __post_init__(self):
        self.dir = np.asarray(self.dir, dtype=np.int8)
        if self.dir.shape != (1 << self.n,):
            raise ValueError("dir must have 2**n entries")
        if self.dir.size and (self.dir.min() < 0 or self.dir.max() >= self.n):
            raise ValueError("directions must lie in [0, n)")

    @classmethod
    def from_targets(cls, n: int, targets) -> "FunctionalMap":
        targets = np.asarray(targets, dtype=np.int64)
        x = targets ^ np.arange(1 << n)
        if np.any(x == 0) or np.any(x & (x - 1)):
            raise ValueError("every target must be a cube neighbour")
        return cls(n, np.log2(x).astype(np.int8))

    @property
    def num_vertices(self) -> int:
        return 1 << self.n

    def f(self) -> np.ndarray:
        """Image array ``f(v)`` for every vertex."""
        return np.arange(1 << self.n, dtype=np.int64) ^ (1 << self.dir.astype(np.int64))

    def as_choices(self) -> KOutSample:
        return KOutSample(self.n, np.uint32(1) << self.dir.astype(np.uint32), self.seed, k=1)

    def as_undirected(self) -> CubeSubgraph:
        return as_undirected(self)


def sample_one_out(n: int, seed=0) -> FunctionalMap:
    n = check_dimension(n)
    seed = as_seed(seed)
    key = seed.key(_ONE_OUT, n)
    dirs = np.empty(1 << n, dtype=np.int8)
    for verts in _chunks(1 << n):
        dirs[verts] = uniform_ints(key, verts, 0, n)
    return FunctionalMap(n, dirs, seed)


def _one_more(sample: ChoiceSample, key: int, verts: np.ndarray) -> np.ndarray:
    """One extra uniform direction per vertex among those not yet chosen."""
    n = sample.n
    ch = sample.choices[verts]
    free = popcount(ch ^ np.uint32((1 << n) - 1))
    if np.any(free == 0):
        raise NoRoomError("a vertex has no unchosen direction left")
    rank = uniform_ints(key, verts, 0, free)
    unchosen = ~ch & np.uint32((1 << n) - 1)
    return _nth_set_bit(unchosen, rank, n)


def extend_half(base: ChoiceSample, parity: int, seed=0) -> ChoiceSample:
    """Give every vertex of one parity class one more uniform unchosen direction.

    Vertices of the other class keep their choices bit for bit. Extending a
    1-out sample on class 0 and then class 1 yields a 2-out sample.
    """
    if parity not in (0, 1):
        raise ValueError("parity class must be 0 or 1")
    seed = as_seed(seed)
    key = seed.key(_EXTEND, parity)
    ids = np.arange(1 << base.n, dtype=np.int64)
    verts = ids[parity_class(ids) == parity]
    extra = _one_more(base, key, verts)
    choices = base.choices.copy()
    choices[verts] |= np.uint32(1) << extra.astype(np.uint32)
    out = ChoiceSample(base.n, choices, seed)
    counts = out.choice_counts()
    return out.as_kout() if np.all(counts == counts[0]) else out


@dataclass
class StagedSample:
    """Three-phase build ``G0 <= G1 <= G2`` of a k-out sample.

    ``g0`` is a (k-1)-out sample. Every vertex's k-th direction ``extra[v]``
    is drawn from its own stream among the directions ``g0`` left unchosen;
    active vertices add it in phase one, the rest in phase two. Because the
    draw never looks at the phase, ``G2`` has the k-out law for any predicate.
    """

    g0_sample: KOutSample
    extra: np.ndarray
    active: np.ndarray

    @property
    def n(self) -> int:
        return self.g0_sample.n

    @property
    def k(self) -> int:
        return self.g0_sample.k + 1

    def _with_extra(self, mask: np.ndarray) -> ChoiceSample:
        ch = self.g0_sample.choices.copy()
        ch[mask] |= np.uint32(1) << self.extra[mask].astype(np.uint32)
        return ChoiceSample(self.n, ch, self.g0_sample.seed)

    def g0(self) -> KOutSample:
        return self.g0_sample

    def g1(self) -> ChoiceSample:
        return self._with_extra(self.active)

    def g2(self) -> KOutSample:
        return self._with_extra(np.ones_like(self.active)).as_kout()


def staged_sample(n: int, k: int, active_predicate: Callable | None = None, seed=0) -> StagedSample:
    """Build ``G0 ~ Q^n(k-1)``, then add k-th edges to active vertices, then the rest.

    ``active_predicate(g0)`` returns a boolean array over vertices (``None``
    means no vertex is active).
    """
    n = check_dimension(n)
    if not 2 <= k <= n:
        raise ValueError(f"staged build needs 2 <= k <= n, got k={k}, n={n}")
    seed = as_seed(seed)
    g0 = sample_kout(n, k - 1, seed.child(_STAGED, 0))
    key = seed.key(_STAGED, 1)
    extra = np.empty(1 << n, dtype=np.int8)
    for verts in _chunks(1 << n):
        extra[verts] = _one_more(g0, key, verts)
    if active_predicate is None:
        active = np.zeros(1 << n, dtype=bool)
    else:
        active = np.asarray(active_predicate(g0), dtype=bool)
        if active.shape != (1 << n,):
            raise ValueError("active predicate must return one flag per vertex")
    return StagedSample(g0, extra, active)


def write_sample(sample: KOutSample, fh) -> None:
    """Header ``(magic, n, k, seed master, seed trial)`` then 2**n little-endian u32 masks."""
    fh.write(_HEADER.pack(DUMP_MAGIC, sample.n, sample.k, sample.seed.master, sample.seed.trial))
    fh.write(sample.choices.astype("<u4").tobytes())


def read_sample(fh) -> KOutSample:
    raw = fh.read(_HEADER.size)
    if len(raw) != _HEADER.size:
        raise ValueError("truncated sample header")
    magic, n, k, master, trial = _HEADER.unpack(raw)
    if magic != DUMP_MAGIC:
        raise ValueError("not a k-out sample dump")
    body = fh.read(4 * (1 << n))
    if len(body) != 4 * (1 << n):
        raise ValueError("truncated sample body")
    choices = np.frombuffer(body, dtype="<u4").astype(np.uint32)
    return KOutSample(n, choices, Seed(master, trial), k=k)
