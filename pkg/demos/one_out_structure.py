"""
The 1-out cube as a functional digraph
======================================

Every vertex of Q^n picks one neighbour. Each component then holds exactly
one cycle, almost all cycles have length two, and the number of components
sits near 2^(n-1)/n.
"""

import numpy as np

from koutcube import components, cycle_census, sample_one_out, trajectory

n = 14
fm = sample_one_out(n, seed=1)
census = cycle_census(fm)
summary = components(fm)

print(f"n={n}: {summary.count} components, {census.num_cycles} cycles")
print("cycle lengths:", census.counts)
print(f"expected two-cycles 2^(n-1)/n = {2 ** (n - 1) / n:.1f}, observed {census.two_cycles}")
print("longest tail:", census.max_tail, " n^2 =", n * n)

# follow one orbit: the Hamming distance from the start moves by one each step
tr = trajectory(fm, 0, 12)
print("flipped coordinates:", tr.steps)
print("distance from start:", tr.lsize)

# component sizes stay tiny compared with 2^n
print("largest components:", summary.sizes[:5].tolist(), "of", 2**n)
print("mean size:", np.mean(summary.sizes))
