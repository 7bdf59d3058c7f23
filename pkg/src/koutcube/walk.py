"""The biased walk on ``{0, ..., n}`` tracking Hamming distance of a 1-out orbit.

From state ``s`` the walk moves to ``s - 1`` with probability ``s/n`` and to
``s + 1`` otherwise, starting at 0. Besides Monte Carlo simulation, the exact
per-step law is computed by a forward dynamic programme, which is used to
check the tail bounds numerically for concrete ``n``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError
from .seeding import as_seed

WORK_BUDGET = 50_000_000


@dataclass(frozen=True)
class WalkParams:
    n: int
    horizon: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.horizon is None:
            object.__setattr__(self, "horizon", 2 * self.n * self.n)
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")

    @property
    def window(self) -> tuple[int, int]:
        """Half-step range ``[ceil(n/4), n**2]`` of the return window."""
        return math.ceil(self.n / 4), self.n * self.n


def transition_matrix(n: int) -> np.ndarray:
    T = np.zeros((n + 1, n + 1))
    for s in range(n + 1):
        if s > 0:
            T[s, s - 1] = s / n
        if s < n:
            T[s, s + 1] = (n - s) / n
    return T


def _step(p: np.ndarray, down: np.ndarray, up: np.ndarray) -> np.ndarray:
    out = np.zeros_like(p)
    out[1:] += p[:-1] * up[:-1]
    out[:-1] += p[1:] * down[1:]
    return out


@dataclass
class WalkDistribution:
    """Exact law of the walk at every step up to the horizon.

    ``probs[t, s] = P(L_t = s)``. ``window_hit_probability`` is
    ``P(L_{2l} = 0 for some l in window)``, with the window clipped to the
    horizon (``window_covered``).
    """

    params: WalkParams
    probs: np.ndarray
    window_hit_probability: float
    window_covered: tuple[int, int]
    residual: float

    @property
    def n(self) -> int:
        return self.params.n

    def prob_zero(self, t: int) -> float:
        return float(self.probs[t, 0])

    def prob_at_most(self, t: int, c: int) -> float:
        return math.fsum(self.probs[t, : c + 1])

    def rows(self, nonzero_only: bool = True):
        """``(step, state, mass)`` triples for CSV export."""
        for t, row in enumerate(self.probs):
            for s, m in enumerate(row):
                if m or not nonzero_only:
                    yield t, s, float(m)

    def write_csv(self, fh, nonzero_only: bool = True) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "state", "mass"])
        for t, s, m in self.rows(nonzero_only):
            w.writerow([t, s, repr(m)])


def exact_distribution(params: WalkParams, budget: int = WORK_BUDGET) -> WalkDistribution:
    """Forward DP over the ``n + 1``-state chain.

    The window event is handled by a second, absorbing copy of the chain:
    at every even step ``2l`` with ``l`` in the window, its mass at 0 is moved
    into an accumulator, so each path is counted at most once.
    """
    n, horizon = params.n, params.horizon
    if n * horizon > budget:
        raise BudgetError(f"n * horizon = {n * horizon} exceeds the DP budget {budget}")
    states = np.arange(n + 1)
    down = states / n
    up = (n - states) / n
    lo, hi = params.window
    probs = np.zeros((horizon + 1, n + 1))
    probs[0, 0] = 1.0
    free = probs[0].copy()
    absorbing = free.copy()
    hit_terms = []
    hit_sum, hit_comp = 0.0, 0.0  # Kahan running total of hit_terms
    worst = 0.0
    for t in range(1, horizon + 1):
        free = _step(free, down, up)
        absorbing = _step(absorbing, down, up)
        probs[t] = free
        if t % 2 == 0 and lo <= t // 2 <= hi:
            term = float(absorbing[0])
            hit_terms.append(term)
            absorbing[0] = 0.0
            y = term - hit_comp
            tot = hit_sum + y
            hit_comp = (tot - hit_sum) - y
            hit_sum = tot
        worst = max(worst, abs(math.fsum(free) - 1.0),
                    abs(math.fsum(absorbing) + hit_sum - 1.0))
    window_hit = math.fsum(hit_terms)
    covered = (lo, min(hi, horizon // 2))
    return WalkDistribution(params, probs, window_hit, covered, worst)


def early_low_probability(dist: WalkDistribution) -> tuple[float, float]:
    """``P(L_{floor(n/5)} <= ceil(n/20))`` and the bound ``exp(-n/1000)``."""
    n = dist.n
    return dist.prob_at_most(n // 5, math.ceil(n / 20)), math.exp(-1e-3 * n)


def conditional_step_probability(n: int, start: int, steps: int, threshold: int) -> float:
    """``P(L_{i+steps} <= threshold | L_i = start)`` by DP from a point mass."""
    states = np.arange(n + 1)
    down = states / n
    up = (n - states) / n
    p = np.zeros(n + 1)
    p[start] = 1.0
    for _ in range(steps):
        p = _step(p, down, up)
    return math.fsum(p[: threshold + 1])


def conditional_step_bound(n: int) -> tuple[float, int, float]:
    """Worst case over states ``s >= n/20`` of falling to ``<= n/20`` within ``floor(n/40)`` steps.

    Returns ``(worst probability, worst start state, exp(-n/1000))``. The
    chain is time-homogeneous, so the worst case over start states bounds the
    conditional probability at every time ``i``.
    """
    threshold = math.ceil(n / 20)
    steps = n // 40
    worst, arg = -1.0, threshold
    for s in range(threshold, n + 1):
        p = conditional_step_probability(n, s, steps, threshold)
        if p > worst:
            worst, arg = p, s
    return worst, arg, math.exp(-1e-3 * n)


def conditional_step_grid(dist: WalkDistribution, times) -> dict[int, float]:
    """Exact ``P(L_{i+m} <= c | L_i >= c)`` under the walk's own law at each time ``i``."""
    n = dist.n
    c = math.ceil(n / 20)
    m = n // 40
    Tm = np.linalg.matrix_power(transition_matrix(n), m)
    out = {}
    for i in times:
        if i + m >= len(dist.probs):
            continue
        p = dist.probs[i].copy()
        p[:c] = 0.0
        mass = math.fsum(p)
        if mass == 0.0:
            continue
        out[int(i)] = math.fsum((p @ Tm)[: c + 1]) / mass
    return out


def bound_report(n: int, dist: WalkDistribution | None = None) -> dict:
    """All three tail checks for one ``n``, with pass flags."""
    if dist is None:
        dist = exact_distribution(WalkParams(n))
    early, early_bound = early_low_probability(dist)
    cond, cond_state, cond_bound = conditional_step_bound(n)
    return {
        "n": n,
        "window_hit_probability": dist.window_hit_probability,
        "window_bound": float(n) ** -4,
        "window_ok": dist.window_hit_probability <= float(n) ** -4,
        "early_low_probability": early,
        "early_low_bound": early_bound,
        "early_low_ok": early <= early_bound,
        "conditional_step_probability": cond,
        "conditional_step_state": cond_state,
        "conditional_step_bound": cond_bound,
        "conditional_step_ok": cond <= cond_bound,
        "residual": dist.residual,
    }


def simulate_walks(n: int, steps: int, runs: int, seed=0) -> np.ndarray:
    """``runs`` independent trajectories, shape ``(runs, steps + 1)``."""
    rng = np.random.default_rng(as_seed(seed).key(0x57A1C))
    out = np.zeros((runs, steps + 1), dtype=np.int64)
    cur = np.zeros(runs, dtype=np.int64)
    for t in range(1, steps + 1):
        go_down = rng.random(runs) * n < cur
        cur = np.where(go_down, cur - 1, cur + 1)
        out[:, t] = cur
    return out


def simulate_walk(params: WalkParams, seed=0) -> np.ndarray:
    """One trajectory ``L_0, ..., L_horizon``."""
    return simulate_walks(params.n, params.horizon, 1, seed)[0]
