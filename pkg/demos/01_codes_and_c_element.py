"""
Delay-insensitive codes and the C-element
=========================================

Dual-rail and 1-of-4 code words, and the two ways of building a C-element.
"""

# A dual-rail bit uses two wires: (1,0) is 1, (0,1) is 0, (0,0) is the spacer.
from asyncadder import classify, encode_dual_rail, encode_one_of_four, decode_one_of_four
for bit in (0, 1):
    print("bit", bit, "->", tuple(encode_dual_rail(bit)))
print("(1,1) is", classify((1, 1)))

# Two bits travel on one 1-of-4 group: exactly one of four wires is high.
for x in (0, 1):
    for y in (0, 1):
        rails = encode_one_of_four(x, y)
        print((x, y), "->", tuple(rails), "->", decode_one_of_four(rails))

# The C-element waits for both inputs to agree and otherwise holds its output.
# It can be a primitive, or an AO222 gate with its own output fed back.
from asyncadder.netlist import Circuit, GateKind, build_c2_from_ao222
from asyncadder.sim import simulate

behavioral = Circuit("c2")
for n in ("a", "b", "y"):
    behavioral.add_net(n)
behavioral.add_gate(GateKind.C2, ("a", "b"), "y")
structural = Circuit("c2_ao222")
build_c2_from_ao222(structural, "a", "b", "y")

stimulus = [(0, "a", 1), (200, "b", 1), (400, "a", 0), (600, "b", 0)]
for c in (behavioral, structural):
    print(c.name, simulate(c, stimulus).transitions("y"))
# Same edges; the AO222 version is 12 ps slower per edge with the default table.
