"""
Exact law of the biased walk
============================

The walk steps down from state s with probability s/n. Its exact
distribution comes from a forward recursion, and the tail estimates are
checked for concrete n.
"""

from koutcube.walk import WalkParams, bound_report, exact_distribution, simulate_walks

for n in (40, 60, 80):
    r = bound_report(n)
    print(f"n={n}: return in window {r['window_hit_probability']:.3e} (n^-4 = {r['window_bound']:.3e}), "
          f"early low {r['early_low_probability']:.2e}, conditional {r['conditional_step_probability']:.3f}")

# Monte Carlo agrees with the recursion
n = 20
dist = exact_distribution(WalkParams(n, 10))
paths = simulate_walks(n, 10, 50_000, seed=2)
for t in (2, 4, 6):
    print(f"P(L_{t}=0): exact {dist.prob_zero(t):.5f}  simulated {(paths[:, t] == 0).mean():.5f}")
