"""
Checking heuristics against exhaustive search
=============================================

On tiny grids every placement can be enumerated. The exhaustive optimum is
a floor that no heuristic can beat, and shows how often DIAP lands on it.
"""

import numpy as np

from antenna_placement import ProblemConfig, bench

rng = np.random.default_rng(7)
hits = 0
for i in range(10):
    m_tilde, n_tilde = (int(x) for x in rng.integers(3, 6, size=2))
    config = ProblemConfig(m_tilde, n_tilde, 2, 2, int(rng.integers(4, 11)))
    best, optimum = bench.exhaustive_search(config)
    diap, _ = bench.run_diap(config, 0.33, seed=i)
    riap = bench.run_riap(config, seed=i, algorithms=("riap",))[0]
    hits += diap.coherence <= optimum + 1e-9
    print(f"grid {m_tilde}x{n_tilde} G={config.g_count:>2}  optimum {optimum:.4f} at {best.tx_indices}/{best.rx_indices}"
          f"  diap {diap.coherence:.4f}  riap {riap.coherence:.4f}")

print(f"diap reached the optimum on {hits} of 10 instances")
