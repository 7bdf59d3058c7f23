"""Acceptance suite: one test per numbered criterion.

Each test records a one-line detail; the conftest prints a PASS/FAIL line per
criterion at the end of the run. Run alone with
``pytest tests/test_acceptance.py -v``.
"""

import itertools
import math
import time
from collections import deque

import numpy as np
import pytest
from scipy.stats import chi2_contingency

from koutcube.connectivity import (
    active_predicate,
    degree_census,
    degree_k_probability,
    is_connected,
    plant_subcube_component,
    subcube_component_scan,
    vertex_connectivity,
    vertex_connectivity_bruteforce,
)
from koutcube.experiments import ExperimentConfig, run
from koutcube.hypercube import (
    SubcubeSpec,
    _all_subset_boundaries,
    iso_check,
    iso_lower_bound,
    neighbors,
    subcube_vertices,
)
from koutcube.sampler import as_undirected, sample_kout, sample_one_out, staged_sample
from koutcube.seeding import Seed, derive
from koutcube.structure import components, connected_set_bound, count_connected_sets, cycle_census
from koutcube.walk import WalkParams, bound_report, exact_distribution, simulate_walks

acceptance = pytest.mark.acceptance


def records(ns, ks, trials, seed, metrics):
    return list(run(ExperimentConfig("acceptance", tuple(ns), tuple(ks), trials, seed, metrics=metrics, workers=1)))


@acceptance(1, "unicyclicity: components == cycles, 1000 one-out samples, n=3..12")
def test_unicyclicity(record_property):
    start = time.perf_counter()
    mismatches = 0
    for i in range(1000):
        n = 3 + i % 10
        fm = sample_one_out(n, Seed(101, i))
        census = cycle_census(fm, verify=False)
        mismatches += census.num_cycles != components(fm).count
    elapsed = time.perf_counter() - start
    record_property("detail", f"mismatches={mismatches} time={elapsed:.1f}s (limit 10s)")
    assert mismatches == 0 and elapsed < 10


@acceptance(2, "mean two_cycles at n=16 within 3% of 2^15/16 = 2048")
def test_two_cycle_mean(record_property):
    n = 16
    recs = records([n], [1], 2000, 202, ("two_cycles",))
    mean = float(np.mean([r.metrics["two_cycles"] for r in recs]))
    expected = 2 ** (n - 1) / n
    rel = mean / expected - 1
    record_property("detail", f"mean={mean:.2f} expected={expected:.0f} rel.err={rel:+.4f} (tol 0.03)")
    assert abs(rel) <= 0.03


@acceptance(3, "k=1 component count at n=20: mean / (2^19/20) in [0.9, 1.1]")
def test_component_count_k1(record_property):
    n = 20
    recs = records([n], [1], 200, 303, ("component_count",))
    ratio = float(np.mean([r.metrics["component_count"] for r in recs])) / (2 ** (n - 1) / n)
    record_property("detail", f"ratio={ratio:.4f}")
    assert 0.9 <= ratio <= 1.1


@acceptance(4, "giant trend: k=1 median giant falls, k=2 giant rises and second falls, n=12,16,20")
def test_giant_trend(record_property):
    ns = (12, 16, 20)
    med, rate = {}, {}
    for k in (1, 2):
        recs = records(ns, [k], 100, 404, ("giant_fraction", "second_fraction", "connected"))
        for n in ns:
            rows = [r.metrics for r in recs if r.n == n]
            med[n, k] = (float(np.median([m["giant_fraction"] for m in rows])),
                         float(np.median([m["second_fraction"] for m in rows])))
            rate[n, k] = float(np.mean([m["connected"] for m in rows]))
    g1 = [med[n, 1][0] for n in ns]
    g2 = [med[n, 2][0] for n in ns]
    s2 = [med[n, 2][1] for n in ns]
    record_property("detail", "k=1 giant " + ", ".join(f"{x:.3g}" for x in g1)
                    + "; k=2 giant " + ", ".join(f"{x:.6f}" for x in g2)
                    + "; k=2 second " + ", ".join(f"{x:.3g}" for x in s2)
                    + "; k=2 connected rate " + ", ".join(f"{rate[n, 2]:.2f}" for n in ns))
    assert g1[0] > g1[1] > g1[2]
    assert g2[0] < g2[1] < g2[2]
    assert s2[0] > s2[1] > s2[2]


@acceptance(5, "walk tail bounds by exact DP, n=40,60,80,100")
def test_walk_bounds(record_property):
    start = time.perf_counter()
    parts, ok = [], True
    for n in (40, 60, 80, 100):
        r = bound_report(n)
        ok &= r["window_ok"] and r["early_low_ok"] and r["conditional_step_ok"]
        parts.append(f"n={n}: hit={r['window_hit_probability']:.3g}<=n^-4={r['window_bound']:.3g} "
                     f"early={r['early_low_probability']:.3g} cond={r['conditional_step_probability']:.3g}"
                     f"<={r['early_low_bound']:.3g}")
    elapsed = time.perf_counter() - start
    record_property("detail", "; ".join(parts) + f"; time={elapsed:.1f}s")
    assert ok and elapsed < 30


@acceptance(6, "walk DP vs Monte Carlo: P(L_2l = 0), l=1..5, n=10,20, 1e5 runs, 3 sigma")
def test_walk_dp_vs_mc(record_property):
    runs = 100_000
    worst = 0.0
    for n in (10, 20):
        dist = exact_distribution(WalkParams(n, 10))
        paths = simulate_walks(n, 10, runs, Seed(606, n))
        for l in range(1, 6):
            p = dist.prob_zero(2 * l)
            sigma = math.sqrt(p * (1 - p) / runs)
            z = abs((paths[:, 2 * l] == 0).mean() - p) / sigma
            worst = max(worst, z)
    record_property("detail", f"largest deviation {worst:.2f} sigma")
    assert worst <= 3


@acceptance(7, "n=8, k=3,4: connected implies kappa >= k; kappa <= min degree")
def test_connected_implies_k_connected(record_property):
    bad, connected_count, above_degree = 0, 0, 0
    for k in (3, 4):
        for t in range(50):
            g = as_undirected(sample_kout(8, k, Seed(derive(707, k), t)))
            kappa = vertex_connectivity(g)
            above_degree += kappa > int(g.degrees().min())
            if is_connected(g):
                connected_count += 1
                bad += kappa < k
    record_property("detail", f"connected={connected_count}/100 violations={bad} kappa>mindeg={above_degree}")
    assert bad == 0 and above_degree == 0


@acceptance(8, "degree-k rate at n=12, k=3 within 3 sigma of (1-k/n)^(n-k)")
def test_degree_k_rate(record_property):
    n, k, trials = 12, 3, 500
    rates = np.array([degree_census(sample_kout(n, k, Seed(808, t)), k)[1] / 2**n for t in range(trials)])
    p = degree_k_probability(n, k)
    sigma = rates.std(ddof=1) / math.sqrt(trials)
    z = abs(rates.mean() - p) / sigma
    record_property("detail", f"rate={rates.mean():.5f} p={p:.5f} z={z:.2f}")
    assert z <= 3


@acceptance(9, "edge isoperimetry: exhaustive n<=4 with subcube equality, 1e4 sets at n=16")
def test_isoperimetry(record_property):
    start = time.perf_counter()
    violations, tight_subcubes, subcubes = 0, 0, 0
    for n in range(1, 5):
        report = iso_check(n)
        violations += report["violations"]
        size, bnd = _all_subset_boundaries(n)
        for d in range(n + 1):
            for free in itertools.combinations(range(n), d):
                rest = [c for c in range(n) if c not in free]
                for ones in itertools.chain.from_iterable(itertools.combinations(rest, r) for r in range(len(rest) + 1)):
                    A = subcube_vertices(SubcubeSpec.from_sets(n, free, ones), n)
                    mask = int(sum(1 << int(v) for v in A))
                    subcubes += 1
                    tight_subcubes += bnd[mask] == iso_lower_bound(n, len(A))
    sampled = iso_check(16, 10_000, seed=909)
    violations += sampled["violations"]
    elapsed = time.perf_counter() - start
    record_property("detail", f"violations={violations} subcube equality {tight_subcubes}/{subcubes} "
                              f"sampled sets={sampled['sets']} time={elapsed:.1f}s")
    assert violations == 0 and tight_subcubes == subcubes and elapsed < 30


@acceptance(10, "staged G2 vs direct sampler at n=8, k=2: chi-square p >= 0.01")
def test_staged_law(record_property):
    n, k, trials = 8, 2, 2000
    predicate = active_predicate()
    hist = np.zeros((2, n + 1))
    conn = np.zeros((2, 2))
    for t in range(trials):
        staged = staged_sample(n, k, predicate, Seed(1010, t)).g2()
        direct = sample_kout(n, k, Seed(1011, t))
        for row, s in enumerate((staged, direct)):
            g = as_undirected(s)
            hist[row] += np.bincount(g.degrees(), minlength=n + 1)
            conn[row, int(components(g).count == 1)] += 1
    keep = hist.sum(axis=0) > 0
    p_deg = chi2_contingency(hist[:, keep]).pvalue
    if np.all(conn.sum(axis=0) > 0):
        p_conn = chi2_contingency(conn).pvalue
    else:
        p_conn = 1.0  # both arms identical (all connected or none)
    record_property("detail", f"degree p={p_deg:.3f} connectivity p={p_conn:.3f} "
                              f"rates {conn[0, 1] / trials:.4f} vs {conn[1, 1] / trials:.4f}")
    assert p_deg >= 0.01 and p_conn >= 0.01


@acceptance(11, "planted subcube at n=10, k=3 recovered in 100/100, never connected")
def test_planted_subcube(record_property):
    start = time.perf_counter()
    rng = np.random.default_rng(1111)
    found, disconnected = 0, 0
    for t in range(100):
        free = rng.choice(10, 3, replace=False).tolist()
        ones = [c for c in range(10) if c not in free and rng.random() < 0.5]
        spec = SubcubeSpec.from_sets(10, free, ones)
        s = plant_subcube_component(10, 3, spec, Seed(1112, t))
        found += spec in subcube_component_scan(s)
        disconnected += not is_connected(s)
    elapsed = time.perf_counter() - start
    record_property("detail", f"recovered={found}/100 disconnected={disconnected}/100 time={elapsed:.1f}s")
    assert found == 100 and disconnected == 100 and elapsed < 30


def _brute_connected_sets(n, v, s):
    count = 0
    for rest in itertools.combinations([x for x in range(1 << n) if x != v], s - 1):
        S = {v, *rest}
        seen, q = {v}, deque([v])
        while q:
            x = q.popleft()
            for y in neighbors(x, n):
                if y in S and y not in seen:
                    seen.add(y)
                    q.append(y)
        count += len(seen) == s
    return count


@acceptance(12, "connected sets in Q3 containing v: count <= (en)^s, s=1..4")
def test_connected_set_bound(record_property):
    start = time.perf_counter()
    counts = {s: count_connected_sets(3, 0, s) for s in range(1, 5)}
    agree = all(counts[s] == _brute_connected_sets(3, 0, s) for s in counts)
    within = all(counts[s] <= connected_set_bound(3, s) for s in counts)
    elapsed = time.perf_counter() - start
    record_property("detail", f"counts={counts} bounds="
                              + str({s: round(connected_set_bound(3, s), 1) for s in counts})
                              + f" brute-force agree={agree}")
    assert within and agree and elapsed < 5


@acceptance(13, "kappa by max-flow equals exhaustive removal, n=3, 50 k=2 samples")
def test_kappa_oracle(record_property):
    start = time.perf_counter()
    mismatches = 0
    values = []
    for t in range(50):
        g = as_undirected(sample_kout(3, 2, Seed(1313, t)))
        a, b = vertex_connectivity(g), vertex_connectivity_bruteforce(g)
        mismatches += a != b
        values.append(a)
    elapsed = time.perf_counter() - start
    record_property("detail", f"mismatches={mismatches} kappa values={sorted(set(values))} time={elapsed:.2f}s")
    assert mismatches == 0 and elapsed < 30


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v"]))
