"""
The early-output full adder
===========================

One stage: a 1-of-4 operand code E, a dual-rail carry-in, a dual-rail sum and
carry-out.  Carry-out can appear before the carry-in arrives, and both
outputs return to spacer as soon as the operands do.
"""

from asyncadder import build_full_adder, classify_indication, check_monotonic_cover
from asyncadder.analysis import settle

fa = build_full_adder()
print(fa.gate_counts())

# Steady state for every valid input: one product term per raised rail.
print(check_monotonic_cover(fa).to_text())

# Which inputs each output needs before it can become valid or return to spacer.
profile = classify_indication(fa)
print("set:", profile.set_class)
print("reset:", profile.reset_class)
print("sum needs", profile.requires["SUM_0"], "; carry generate/kill needs only",
      profile.early_set_witness["COUT"])

# Early reset: drop only the operand code, keep the carry-in valid.
levels = settle(fa, {"E_0": (1, 0), "CIN": 1}, rtz=["E_0"])
print("carry-in rails", levels["CIN1_0"], levels["CIN0_0"],
      "outputs", [levels[n] for n in ("SUM1_0", "SUM0_0", "COUT1_0", "COUT0_0")])
