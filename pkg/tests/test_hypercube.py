import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from koutcube.hypercube import (
    InvalidSpecError,
    SubcubeSpec,
    boundary_size,
    canonical_edge,
    check_dimension,
    edge_count,
    iso_check,
    iso_interval_bound,
    iso_lower_bound,
    neighbors,
    parity_class,
    popcount,
    satisfies_iso,
    subcube_outer_boundary,
    subcube_vertices,
)


def brute_boundary(A, n):
    A = set(A)
    return sum(1 for v in A for w in neighbors(v, n) if w not in A)


def test_neighbors_and_parity():
    assert neighbors(0, 3) == [1, 2, 4]
    assert sorted(neighbors(5, 3)) == [1, 4, 7]
    assert parity_class(0) == 0 and parity_class(7) == 1
    assert popcount(np.array([0, 3, 255], dtype=np.uint32)).tolist() == [0, 2, 8]


def test_dimension_bounds():
    with pytest.raises(ValueError):
        check_dimension(0)
    with pytest.raises(ValueError):
        check_dimension(31)


def test_edge_count_examples():
    everything = range(8)
    assert edge_count(everything, everything, 3) == 12
    assert boundary_size([0], 3) == 3
    assert boundary_size(range(4), 3) == 4  # a 2-face of Q3


def test_iso_bound_values():
    assert iso_lower_bound(3, 1) == 3
    assert iso_lower_bound(4, 4) == 8
    assert iso_lower_bound(3, 8) == 0
    with pytest.raises(ValueError):
        iso_lower_bound(3, 0)
    with pytest.raises(ValueError):
        iso_lower_bound(3, 9)
    assert iso_interval_bound(4, 1, 16) == 0
    assert iso_interval_bound(4, 2, 4) == min(iso_lower_bound(4, 2), iso_lower_bound(4, 4))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_iso_exhaustive_with_brute_force(n):
    # independent count over every nonempty subset
    nv = 1 << n
    for mask in range(1, 1 << nv):
        A = [v for v in range(nv) if mask >> v & 1]
        b = brute_boundary(A, n) if n <= 3 else None
        if b is not None:
            assert b == boundary_size(A, n)
            assert satisfies_iso(b, n, len(A))
    report = iso_check(n)
    assert report["violations"] == 0
    assert report["sets"] == (1 << nv) - 1


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_subcubes_attain_the_bound(n):
    for d in range(n + 1):
        spec = SubcubeSpec.from_sets(n, range(d))
        A = subcube_vertices(spec, n)
        assert boundary_size(A, n) == iso_lower_bound(n, len(A)) == (1 << d) * (n - d)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 8), st.data())
def test_handshake_identity(n, data):
    A = data.draw(st.sets(st.integers(0, (1 << n) - 1), min_size=1))
    rest = set(range(1 << n)) - A
    inner = edge_count(A, A, n)
    assert edge_count(A, rest, n) == n * len(A) - 2 * inner
    assert boundary_size(sorted(A), n) == brute_boundary(A, n)


def test_canonical_edge():
    assert canonical_edge(5, 4) == (4, 0)
    assert canonical_edge(2, 6) == (2, 2)
    with pytest.raises(ValueError):
        canonical_edge(0, 3)


def test_subcube_spec_examples():
    spec = SubcubeSpec.from_sets(3, {0, 1}, ones={2})
    assert spec.level == 1 and spec.dim == 2
    assert subcube_vertices(spec, 3).tolist() == [4, 5, 6, 7]
    assert all(spec.contains(v) for v in (4, 5, 6, 7))
    assert not spec.contains(3)
    outer = subcube_outer_boundary(spec, 3)
    assert outer.tolist() == [0, 1, 2, 3]
    with pytest.raises(InvalidSpecError):
        SubcubeSpec(ones=frozenset({0}), free=frozenset({0, 1}), zeros=frozenset({2})).validate(3)
    with pytest.raises(InvalidSpecError):
        SubcubeSpec.from_sets(3, {5})


@pytest.mark.parametrize("n,d", [(4, 1), (5, 2), (6, 3)])
def test_outer_boundary_size(n, d):
    for free in itertools.combinations(range(n), d):
        spec = SubcubeSpec.from_sets(n, free)
        outer = subcube_outer_boundary(spec, n)
        assert len(outer) == len(set(outer.tolist())) == (1 << d) * (n - d)


def test_iso_sampled_no_violations():
    report = iso_check(10, samples=400, seed=5)
    assert report["violations"] == 0
    assert report["tight"] >= 1
    assert iso_check(10, samples=400, seed=5) == report


def test_log_helper_consistency():
    for s in (1, 2, 3, 7, 64):
        assert math.isclose(iso_lower_bound(8, s), 8 * s - s * math.log2(s))
