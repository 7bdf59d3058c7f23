"""
No giant at k=1, one giant at k=2
=================================

Largest and second-largest component fractions for a few dimensions.
"""

from koutcube import ExperimentConfig, run, summarize

config = ExperimentConfig(
    "giant", ns=(10, 12, 14, 16), ks=(1, 2), trials=10, seed=3,
    metrics=("component_count", "giant_fraction", "second_fraction"),
)
for row in summarize(run(config)):
    if row.metric != "component_count":
        print(f"n={row.n:2d} k={row.k} {row.metric:16s} mean={row.mean:.4f}")
