"""
Netlists, stimulus files and waveforms
======================================

Write the 2-bit adder as a text netlist, read it back, simulate a timed
stimulus and dump the result for a waveform viewer.
"""

import pathlib
import tempfile

from asyncadder import emit_netlist, export_vcd, parse_netlist, parse_stimulus, simulate
from asyncadder import build_rca

rca, _ = build_rca(2, include_encoders=False)
text = emit_netlist(rca)
print("\n".join(text.splitlines()[:6]), "\n...")

circuit = parse_netlist(text, "rca2")
stimulus = parse_stimulus("""
at 0 set E1_0 1
at 0 set E2_1 1
at 0 set CIN1_0 1
at 400 set E1_0 0
at 400 set E2_1 0
at 900 set CIN1_0 0
""")
trace = simulate(circuit, stimulus)
for net in ("COUT1_0", "SUM0_1", "COUT1_1"):
    print(net, trace.transitions(net))

out = pathlib.Path(tempfile.gettempdir()) / "rca2.vcd"
out.write_bytes(export_vcd(trace, circuit, comment="2-bit early-output adder"))
print("wrote", out)
