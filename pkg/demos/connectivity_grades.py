"""
Connectivity, vertex connectivity and cut sets
==============================================

Small cubes only: vertex connectivity by max-flow is capped at 4096 vertices.
"""

import numpy as np

from koutcube import (
    active_set,
    degree_census,
    minimal_disconnected_sets,
    sample_kout,
    staged_sample,
    vertex_connectivity,
)
from koutcube.connectivity import active_predicate, degree_k_probability
from koutcube.seeding import Seed

n = 8
for k in (2, 3, 4):
    kappas = [vertex_connectivity(sample_kout(n, k, Seed(5, t))) for t in range(10)]
    print(f"n={n} k={k}: vertex connectivity over 10 samples {sorted(kappas)}")

# the fraction of degree-k vertices against (1 - k/n)^(n - k)
n, k = 12, 3
rates = [degree_census(sample_kout(n, k, Seed(6, t)), k)[1] / 2**n for t in range(50)]
print(f"degree-{k} rate {np.mean(rates):.4f} vs formula {degree_k_probability(n, k):.4f}")

# vertices cut off by k-1 others in the (k-1)-out graph get their k-th edge first
g0 = sample_kout(7, 1, 7)
report = active_set(g0, cap=6)
print(f"active vertices in a 1-out sample at n=7: {report.size} of {2**7}")
v, (S, L) = next(iter(report.witnesses.items()))
print(f"vertex {v}: set {S} is cut off by {L}")
print("check:", [sorted(s.tolist()) for s in minimal_disconnected_sets(g0, L).sets if v in s])

staged = staged_sample(7, 2, active_predicate(6), seed=8)
print("phase one added edges at", int(staged.active.sum()), "vertices; G2 is an ordinary 2-out sample")
