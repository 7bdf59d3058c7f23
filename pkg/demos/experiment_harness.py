"""
Seeded sweeps and summaries
===========================

Records stream as JSON lines; summaries are CSV with Wilson intervals for
the 0/1 connectivity indicator.
"""

import io
import sys

from koutcube.experiments import (
    ExperimentConfig,
    read_jsonl,
    run,
    summarize,
    threshold_sweep,
    write_jsonl,
    write_summary_csv,
)

buf = io.StringIO()
write_jsonl(run(ExperimentConfig("demo", ns=(8, 10), ks=(1, 2), trials=5, seed=11)), buf)
print(buf.getvalue().splitlines()[0])
write_summary_csv(summarize(read_jsonl(io.StringIO(buf.getvalue()))), sys.stdout)

sweep = threshold_sweep(10, range(1, 5), trials=20, seed=2)
print(f"k0={sweep.k0:.3f} k1={sweep.k1}")
for p in sweep.points:
    print(f"k={p.k}: connected {p.rate:.2f} [{p.wilson_lo:.2f}, {p.wilson_hi:.2f}], mean components {p.mean_components:.1f}")
