import io
import itertools
import math
from collections import Counter, deque

import numpy as np
import pytest
from scipy.stats import chi2_contingency, chisquare

from koutcube.hypercube import neighbors, parity_class
from koutcube.sampler import (
    FunctionalMap,
    KOutSample,
    NoRoomError,
    as_undirected,
    extend_half,
    read_sample,
    sample_kout,
    sample_one_out,
    staged_sample,
    write_sample,
)
from koutcube.seeding import Seed


def bfs_connected(n, edges):
    adj = {v: set() for v in range(1 << n)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    seen = {0}
    q = deque([0])
    while q:
        x = q.popleft()
        for y in adj[x] - seen:
            seen.add(y)
            q.append(y)
    return len(seen) == 1 << n


def test_kout_shape_and_counts():
    s = sample_kout(6, 3, seed=1)
    s.validate()
    assert s.choices.dtype == np.uint32
    assert np.all(s.choice_counts() == 3)
    assert np.all(s.choices < 64)


def test_kout_reproducible():
    assert sample_kout(8, 2, 5) == sample_kout(8, 2, 5)
    assert sample_kout(8, 2, 5) != sample_kout(8, 2, 6)
    assert sample_kout(8, 2, Seed(5, 1)) != sample_kout(8, 2, Seed(5, 0))


def test_kout_invalid():
    with pytest.raises(ValueError):
        sample_kout(3, 0)
    with pytest.raises(ValueError):
        sample_kout(3, 4)


def test_full_choice_gives_cube():
    g = as_undirected(sample_kout(5, 5, 0))
    assert np.all(g.degrees() == 5)
    assert g.num_edges == 5 * 16


def test_n1():
    g = as_undirected(sample_kout(1, 1, 3))
    assert g.num_edges == 1
    assert g.degrees().tolist() == [1, 1]
    assert sample_one_out(1, 9).f().tolist() == [1, 0]


def test_mutual_pair_gives_one_edge():
    fm = FunctionalMap.from_targets(2, [1, 0, 3, 2])
    g = as_undirected(fm)
    assert g.num_edges == 2
    assert g.has_edge(0, 1) and g.has_edge(2, 3) and not g.has_edge(0, 2)


def test_degree_bounds():
    for k in (1, 2, 4):
        deg = as_undirected(sample_kout(7, k, k)).degrees()
        assert deg.min() >= k and deg.max() <= 7


@pytest.mark.parametrize("n,k", [(4, 2), (5, 2), (5, 3)])
def test_subset_uniformity(n, k):
    # every k-subset of directions at a fixed vertex is equally likely
    subsets = {sum(1 << i for i in c): j for j, c in enumerate(itertools.combinations(range(n), k))}
    counts = np.zeros(len(subsets))
    for t in range(400):
        ch = sample_kout(n, k, Seed(11, t)).choices
        for m in ch.tolist():
            counts[subsets[m]] += 1
    assert chisquare(counts).pvalue > 1e-3


def test_one_out_uniform_directions():
    dirs = np.concatenate([sample_one_out(6, Seed(3, t)).dir for t in range(300)])
    assert chisquare(np.bincount(dirs, minlength=6)).pvalue > 1e-3


def n2_connection_table():
    table = {}
    for dirs in itertools.product(range(2), repeat=4):
        edges = [(v, v ^ (1 << d)) for v, d in enumerate(dirs)]
        table[dirs] = bfs_connected(2, edges)
    return table


def test_one_out_n2_against_enumeration():
    table = n2_connection_table()
    assert len(table) == 16
    p = sum(table.values()) / len(table)
    # disconnected only for the two perfect matchings of mutual pairs
    assert p == 14 / 16
    hits = 0
    runs = 100_000
    for t in range(runs):
        hits += table[tuple(sample_one_out(2, Seed(21, t)).dir.tolist())]
    sigma = math.sqrt(p * (1 - p) / runs)
    assert abs(hits / runs - p) < 3 * sigma


def test_expected_edge_count_one_out():
    n, trials = 12, 300
    counts = [as_undirected(sample_one_out(n, Seed(8, t))).num_edges for t in range(trials)]
    expected = 2**n - 2 ** (n - 1) / n
    assert abs(np.mean(counts) - expected) < 3 * np.std(counts, ddof=1) / math.sqrt(trials)


def test_mutual_pairs_brute_force_n2():
    # average number of mutual pairs over all 16 maps equals 2**(n-1)/n = 1
    total = 0
    for dirs in itertools.product(range(2), repeat=4):
        f = [v ^ (1 << d) for v, d in enumerate(dirs)]
        total += sum(1 for v in range(4) if f[f[v]] == v and v < f[v])
    assert total / 16 == 1


def test_extend_half_n2_deterministic():
    base = sample_one_out(2, 4).as_choices()
    ext = extend_half(base, 0, 4)
    for v in range(4):
        if parity_class(v) == 0:
            assert ext.choices[v] == 3
        else:
            assert ext.choices[v] == base.choices[v]


def test_extend_half_keeps_other_class_and_adds_new_direction():
    base = sample_kout(8, 2, 3)
    ext = extend_half(base, 1, 7)
    odd = parity_class(np.arange(256)) == 1
    assert np.array_equal(ext.choices[~odd], base.choices[~odd])
    assert np.all(ext.choice_counts()[odd] == 3)
    assert np.all(ext.choices[odd] & base.choices[odd] == base.choices[odd])
    full = extend_half(ext, 0, 8)
    assert isinstance(full, KOutSample) and full.k == 3


def test_extend_half_no_room():
    with pytest.raises(NoRoomError):
        extend_half(sample_kout(3, 3, 0), 0, 0)


def degree_hist(samples, n):
    h = np.zeros(n + 1)
    for s in samples:
        h += np.bincount(as_undirected(s).degrees(), minlength=n + 1)
    return h


def test_chained_extension_matches_direct():
    n, trials = 8, 2000
    chained = (extend_half(extend_half(sample_one_out(n, Seed(1, t)).as_choices(), 0, Seed(2, t)), 1, Seed(3, t))
               for t in range(trials))
    direct = (sample_kout(n, 2, Seed(4, t)) for t in range(trials))
    a, b = degree_hist(chained, n), degree_hist(direct, n)
    keep = (a + b) > 0
    assert chi2_contingency(np.vstack([a[keep], b[keep]])).pvalue > 0.01


def test_staged_trivial_predicates():
    none = staged_sample(6, 3, None, 2)
    assert none.g1() == none.g0()
    everyone = staged_sample(6, 3, lambda g0: np.ones(64, bool), 2)
    assert everyone.g1() == everyone.g2()
    # the predicate does not change the final sample
    assert none.g2() == everyone.g2()
    with pytest.raises(ValueError):
        staged_sample(6, 1)


def test_staged_monotone():
    st = staged_sample(7, 3, lambda g0: as_undirected(g0).degrees() <= 3, 5)
    a0, a1, a2 = (as_undirected(g).adj for g in (st.g0(), st.g1(), st.g2()))
    assert np.all(a0 & a1 == a0) and np.all(a1 & a2 == a1)
    assert st.g2().k == 3 and st.g0().k == 2


def test_dump_round_trip():
    s = sample_kout(5, 2, Seed(77, 3))
    buf = io.BytesIO()
    write_sample(s, buf)
    raw = buf.getvalue()
    assert raw[:8] == b"KOUTCUBE"
    assert len(raw) == 32 + 4 * 32
    back = read_sample(io.BytesIO(raw))
    assert back == s and back.k == 2 and back.seed == Seed(77, 3)
    with pytest.raises(ValueError):
        read_sample(io.BytesIO(b"NOTACUBE" + raw[8:]))
    with pytest.raises(ValueError):
        read_sample(io.BytesIO(raw[:-4]))
