"""
Forward and reverse latency
===========================

Forward latency grows with the longest carry-propagate run.  Reverse latency
(spacer in to spacer out) does not depend on the adder width at all.
"""

import numpy as np

from asyncadder import build_rca, measure_latency, run_handshake_cycles

for n in (4, 8, 16, 32):
    rca, desc = build_rca(n)
    ladder = [((1 << k) - 1, 0, 0) for k in range(n)]
    _, cycles = run_handshake_cycles(rca, [desc.vector(*v) for v in ladder], record=False)
    m = measure_latency(cycles, desc)
    slope, intercept = m.chain_fit()
    print(f"n={n:2d}  forward {intercept:.0f} + {slope:.0f}*L ps, "
          f"reverse max {m.reverse_max_ps} ps, mean cycle {m.cycle_time_mean_ps:.0f} ps")

# Random operands rarely have long carry runs, so the average case is short.
rng = np.random.default_rng(0)
rca, desc = build_rca(32)
ops = rng.integers(0, 1 << 32, size=(200, 2), dtype=np.uint64)
vecs = [desc.vector(int(a), int(b), 0) for a, b in ops]
_, cycles = run_handshake_cycles(rca, vecs, record=False)
m = measure_latency(cycles, desc)
print(f"32-bit random operands: forward mean {m.forward_mean_ps:.0f} ps, "
      f"max {m.forward_max_ps} ps")
