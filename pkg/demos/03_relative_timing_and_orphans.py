"""
Relative timing and orphans in the ripple carry adder
=====================================================

Stage i's sum resets through its own operands (OR2, AO22, C2 = 238 ps) or
through the carry from stage i-1 (one more AO21, 301 ps).  The circuit is
correct only if the carry falls before it can disturb the next sum.
"""

from asyncadder import (build_rca, check_relative_timing, compute_rt_slack, detect_orphans,
                        fig2_paths, run_handshake_cycles)
from asyncadder.sim import DelayTable, OverrideDelays

print("static paths (ps):", fig2_paths(), "slack:", compute_rt_slack())

# Operand codes return first, the carry-in 500 ps later; an input completion
# detector makes the environment wait for that late carry-in.
rca, desc = build_rca(4, input_detector=True)
vectors = [desc.vector(15, 0, 1), desc.vector(0, 15, 0)]
trace, cycles = run_handshake_cycles(rca, vectors, rtz_skew={"CIN": 500})
print(check_relative_timing(trace, desc, rca).to_text())
print(detect_orphans(trace, rca).to_text())

# Without the detector nobody waits for the carry-in: its late fall is a wire orphan.
rca2, desc2 = build_rca(4)
trace, _ = run_handshake_cycles(rca2, [desc2.vector(15, 0, 1)], rtz_skew={"CIN": 500})
print(detect_orphans(trace, rca2).to_text())

# A carry gate that is slow to fall breaks the ordering and leaves a gate orphan.
slow = OverrideDelays(DelayTable.default(), {"COUT0_1": {"fall": 0.30},
                                             "COUT1_1": {"fall": 0.30}})
trace, _ = run_handshake_cycles(rca2, [desc2.vector(15, 0, 0), desc2.vector(15, 0, 1)], slow)
print(check_relative_timing(trace, desc2, rca2, slow).to_text())
print(detect_orphans(trace, rca2).to_text())
