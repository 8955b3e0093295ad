"""
Elimination rate: speed against quality
=======================================

A larger elimination rate discards more relaxed weight per pass, so the
loop finishes in fewer solves but commits to grid points earlier.
A short seeded sweep shows both effects.
"""

import numpy as np

from antenna_placement import bench, coherence_direct

spec = bench.ExperimentSpec("sweep-p", p_values=(0.1, 0.33, 1.0, 3.0), runs=5)
records = bench.run_sweep_p(spec)

###############################################################################
# Per-p averages (the CLI writes the same numbers to a summary CSV).
print(f"{'p':>5} {'coherence':>10} {'std':>7} {'iterations':>10} {'ms':>7}")
for row in bench.summarize(records):
    print(f"{row['p']:>5} {row['coherence_mean']:>10.4f} {row['coherence_std']:>7.4f} "
          f"{row['outer_iterations_mean']:>10.1f} {row['runtime_ms_mean']:>7.0f}")

###############################################################################
# Each record can be checked again from its index lists.
worst = max(abs(r.coherence - coherence_direct(r.placement(), r.config())) for r in records)
print("largest recheck difference:", worst)
print("seeds used:", sorted({r.seed for r in records}))
print("spread of iterations:", np.ptp([r.outer_iterations for r in records]))
