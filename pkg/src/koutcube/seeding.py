"""Counter-based random streams.

Every draw is a pure function of ``(master, trial, vertex, slot)``, computed
with the SplitMix64 finaliser, so samples do not depend on generation order,
chunking or worker count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
# draws per vertex per stream; k <= 30 subset draws plus headroom
SLOTS = 64


def mix64(x: int) -> int:
    """SplitMix64 finaliser on a Python int."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def mix64_array(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.uint64, copy=True)
    with np.errstate(over="ignore"):
        x ^= x >> np.uint64(30)
        x *= np.uint64(0xBF58476D1CE4E5B9)
        x ^= x >> np.uint64(27)
        x *= np.uint64(0x94D049BB133111EB)
        x ^= x >> np.uint64(31)
    return x


def derive(*parts: int) -> int:
    """Hash a tuple of integers into one 64-bit key."""
    h = 0x6A09E667F3BCC908
    for p in parts:
        h = mix64(h ^ mix64((int(p) & _MASK64) + GOLDEN))
    return h


@dataclass(frozen=True)
class Seed:
    master: int
    trial: int = 0

    def __post_init__(self):
        if not 0 <= self.master < (1 << 64):
            raise ValueError("master seed must be a 64-bit unsigned integer")

    def key(self, *tags: int) -> int:
        return derive(self.master, self.trial, *tags)

    def child(self, *tags: int) -> "Seed":
        """Independent seed for a sub-stage, still reproducible."""
        return Seed(self.key(*tags), 0)


def as_seed(seed) -> Seed:
    if isinstance(seed, Seed):
        return seed
    if isinstance(seed, (tuple, list)):
        return Seed(*(int(s) for s in seed))
    return Seed(int(seed) & _MASK64)


def uniform_ints(key: int, vertices: np.ndarray, slot: int, bound) -> np.ndarray:
    """Uniform integers in ``[0, bound)`` for each vertex at the given slot.

    ``bound`` may be a scalar or per-vertex array (all bounds <= 64). The
    modulo bias is below 2**-58 per outcome.
    """
    counter = vertices.astype(np.uint64) * np.uint64(SLOTS) + np.uint64(slot)
    with np.errstate(over="ignore"):
        z = np.uint64(key) + (counter + np.uint64(1)) * np.uint64(GOLDEN)
    h = mix64_array(z)
    return (h % np.asarray(bound, dtype=np.uint64)).astype(np.int64)
