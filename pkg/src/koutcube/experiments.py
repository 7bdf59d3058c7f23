"""Seeded Monte Carlo trials, sweeps and summaries.

Records are emitted in ``(n, k, trial)`` order whatever the worker count, and
each trial's seed is a hash of ``(master, n, k, trial)``.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import islice, product
from typing import Iterable, Iterator

import numpy as np

from . import connectivity as conn
from .errors import BudgetError
from .sampler import sample_kout, sample_one_out
from .seeding import Seed, derive
from .structure import components, cycle_census, pair_statistic

METRICS = (
    "component_count",
    "giant_fraction",
    "second_fraction",
    "two_cycles",
    "longer_cycles",
    "max_tail",
    "Z_prime",
    "connected",
    "kappa",
    "degree_k_count",
    "subcube_hits",
)
CYCLE_METRICS = {"two_cycles", "longer_cycles", "max_tail"}
BERNOULLI_METRICS = {"connected"}
DEFAULT_METRICS = ("component_count", "giant_fraction", "second_fraction", "Z_prime", "connected")
SUMMARY_HEADER = ["n", "k", "metric", "mean", "std", "wilson_lo", "wilson_hi", "min", "max", "count"]
Z95 = 1.959963984540054
THREADS_ENV = "KOUTCUBE_THREADS"


class ConfigError(ValueError):
    pass


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@dataclass
class ExperimentConfig:
    name: str
    ns: tuple[int, ...]
    ks: tuple[int, ...]
    trials: int
    seed: int = 0
    metrics: tuple[str, ...] = DEFAULT_METRICS
    kconn_ceiling: int | None = None
    active_cap: int = conn.DEFAULT_ACTIVE_CAP
    workers: int = field(default_factory=default_workers)

    def validate(self) -> None:
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        unknown = set(self.metrics) - set(METRICS)
        if unknown:
            raise ConfigError(f"unknown metrics: {sorted(unknown)}")
        for n, k in product(self.ns, self.ks):
            if not 1 <= k <= n:
                raise ConfigError(f"infeasible pair n={n}, k={k}: need 1 <= k <= n")
            if n > 30:
                raise ConfigError(f"n={n} exceeds the dimension cap")
            if "kappa" in self.metrics and (1 << n) > conn.MAX_FLOW_VERTICES:
                raise BudgetError(f"kappa needs 2**n <= {conn.MAX_FLOW_VERTICES}, got n={n}")

    @property
    def grid_size(self) -> int:
        return len(self.ns) * len(self.ks) * self.trials


@dataclass
class TrialRecord:
    experiment: str
    n: int
    k: int
    trial: int
    seed: int
    metrics: dict[str, float]

    def to_json(self) -> str:
        return json.dumps(
            {"experiment": self.experiment, "n": self.n, "k": self.k, "trial": self.trial,
             "seed": self.seed, "metrics": self.metrics},
            separators=(",", ":"),
        )

    @classmethod
    def from_json(cls, line: str) -> "TrialRecord":
        d = json.loads(line)
        return cls(d["experiment"], d["n"], d["k"], d["trial"], d["seed"], d["metrics"])


def trial_seed(master: int, n: int, k: int, trial: int) -> int:
    return derive(master, n, k, trial)


def measure(sample, n: int, k: int, metrics, *, fmap=None, kconn_ceiling=None) -> dict[str, float]:
    """Selected metrics of one sample; cycle metrics only exist for ``k = 1``."""
    wanted = set(metrics)
    out: dict[str, float] = {}
    summary = components(fmap if fmap is not None else sample)
    if "component_count" in wanted:
        out["component_count"] = summary.count
    if "giant_fraction" in wanted:
        out["giant_fraction"] = summary.giant_fraction
    if "second_fraction" in wanted:
        out["second_fraction"] = summary.second_fraction
    if fmap is not None and wanted & CYCLE_METRICS:
        census = cycle_census(fmap, verify=False)
        if census.num_cycles != summary.count:
            raise AssertionError("cycle count differs from component count")
        if "two_cycles" in wanted:
            out["two_cycles"] = census.two_cycles
        if "longer_cycles" in wanted:
            out["longer_cycles"] = census.longer
        if "max_tail" in wanted:
            out["max_tail"] = census.max_tail
    if "Z_prime" in wanted:
        out["Z_prime"] = pair_statistic(summary)
    if "connected" in wanted:
        out["connected"] = int(summary.count == 1)
    if "kappa" in wanted:
        ceiling = kconn_ceiling if kconn_ceiling is not None else n
        out["kappa"] = conn.vertex_connectivity(sample, ceiling=ceiling)
    if "degree_k_count" in wanted:
        out["degree_k_count"] = conn.degree_census(sample, k)[1]
    if "subcube_hits" in wanted:
        out["subcube_hits"] = len(conn.subcube_component_scan(sample))
    return {m: out[m] for m in METRICS if m in out}


def run_trial(config: ExperimentConfig, n: int, k: int, trial: int) -> TrialRecord:
    seed = trial_seed(config.seed, n, k, trial)
    fmap = None
    if k == 1:
        fmap = sample_one_out(n, Seed(seed))
        sample = fmap.as_choices()
    else:
        sample = sample_kout(n, k, Seed(seed))
    metrics = measure(sample, n, k, config.metrics, fmap=fmap, kconn_ceiling=config.kconn_ceiling)
    return TrialRecord(config.name, n, k, trial, seed, metrics)


def run(config: ExperimentConfig) -> Iterator[TrialRecord]:
    """All trials of the grid, streamed in ``(n, k, trial)`` order."""
    config.validate()
    jobs = ((n, k, t) for n, k in product(config.ns, config.ks) for t in range(config.trials))
    if config.workers <= 1:
        for n, k, t in jobs:
            yield run_trial(config, n, k, t)
        return
    batch = 4 * config.workers
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        while True:
            chunk = list(islice(jobs, batch))
            if not chunk:
                break
            yield from pool.map(lambda job: run_trial(config, *job), chunk)


def write_jsonl(records: Iterable[TrialRecord], fh) -> int:
    count = 0
    for rec in records:
        fh.write(rec.to_json() + "\n")
        count += 1
    return count


def read_jsonl(fh) -> Iterator[TrialRecord]:
    for line in fh:
        if line.strip():
            yield TrialRecord.from_json(line)


def wilson_interval(successes: float, count: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if count <= 0:
        return 0.0, 1.0
    p = successes / count
    denom = 1 + z * z / count
    centre = (p + z * z / (2 * count)) / denom
    half = z * math.sqrt(p * (1 - p) / count + z * z / (4 * count * count)) / denom
    lo = 0.0 if successes <= 0 else max(0.0, centre - half)
    hi = 1.0 if successes >= count else min(1.0, centre + half)
    return lo, hi


@dataclass
class SummaryRow:
    n: int
    k: int
    metric: str
    mean: float
    std: float
    wilson_lo: float | None
    wilson_hi: float | None
    min: float
    max: float
    count: int

    def as_list(self) -> list:
        return [self.n, self.k, self.metric, repr(self.mean), repr(self.std),
                "" if self.wilson_lo is None else repr(self.wilson_lo),
                "" if self.wilson_hi is None else repr(self.wilson_hi),
                repr(float(self.min)), repr(float(self.max)), self.count]


def summarize(records: Iterable[TrialRecord]) -> list[SummaryRow]:
    """Group by ``(n, k, metric)``; Wilson intervals for 0/1 metrics."""
    groups: dict[tuple[int, int, str], list[float]] = {}
    for rec in records:
        for name, value in rec.metrics.items():
            groups.setdefault((rec.n, rec.k, name), []).append(float(value))
    rows = []
    order = {m: i for i, m in enumerate(METRICS)}
    for (n, k, name), values in sorted(groups.items(), key=lambda kv: (kv[0][0], kv[0][1], order.get(kv[0][2], 99), kv[0][2])):
        arr = np.asarray(values)
        std = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
        lo = hi = None
        if name in BERNOULLI_METRICS:
            lo, hi = wilson_interval(float(arr.sum()), len(arr))
        rows.append(SummaryRow(n, k, name, float(arr.mean()), std, lo, hi,
                               float(arr.min()), float(arr.max()), len(arr)))
    return rows


def write_summary_csv(rows: Iterable[SummaryRow], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SUMMARY_HEADER)
    for row in rows:
        w.writerow(row.as_list())


@dataclass
class SweepPoint:
    k: int
    rate: float
    wilson_lo: float
    wilson_hi: float
    trials: int
    mean_components: float


@dataclass
class SweepResult:
    n: int
    k0: float
    k1: int
    points: list[SweepPoint]

    def rates(self) -> dict[int, float]:
        return {p.k: p.rate for p in self.points}

    def monotone_within_ci(self) -> bool:
        """No later rate sits wholly below an earlier one's interval."""
        return all(b.wilson_hi >= a.wilson_lo for a, b in zip(self.points, self.points[1:]))


def threshold_sweep(n: int, ks: Iterable[int], trials: int, seed: int = 0, workers: int | None = None) -> SweepResult:
    """Empirical connectivity rate per k, labelled with the threshold values."""
    ks = tuple(ks)
    config = ExperimentConfig("sweep", (n,), ks, trials, seed,
                              metrics=("component_count", "connected"),
                              workers=workers if workers is not None else default_workers())
    by_k: dict[int, list[TrialRecord]] = {k: [] for k in ks}
    for rec in run(config):
        by_k[rec.k].append(rec)
    points = []
    for k in ks:
        recs = by_k[k]
        hits = sum(r.metrics["connected"] for r in recs)
        lo, hi = wilson_interval(hits, len(recs))
        mean_comp = float(np.mean([r.metrics["component_count"] for r in recs]))
        points.append(SweepPoint(k, hits / len(recs), lo, hi, len(recs), mean_comp))
    return SweepResult(n, conn.k0(n) if n >= 2 else float("nan"), conn.k1(n) if n >= 2 else 1, points)
