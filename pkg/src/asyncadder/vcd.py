"""Value change dump export of simulation traces."""
from __future__ import annotations

from typing import Dict, List

from .netlist import Circuit
from .sim import Trace


def _identifier(n: int) -> str:
    # printable ASCII 33..126, little-endian base 94
    chars = []
    while True:
        n, r = divmod(n, 94)
        chars.append(chr(33 + r))
        if n == 0:
            break
        n -= 1
    return "".join(chars)


def export_vcd(trace: Trace, circuit: Circuit, *, module: str = None,
               comment: str = None) -> bytes:
    """Render ``trace`` as VCD text with a 1 ps timescale, one wire per net."""
    if not trace.recorded:
        raise ValueError("trace was recorded with record=False; nothing to dump")
    module = module or circuit.name
    ids: Dict[str, str] = {n: _identifier(i) for i, n in enumerate(trace.nets)}
    out: List[str] = []
    out.append("$version asyncadder $end")
    if comment:
        out.append(f"$comment {comment} $end")
    out.append("$timescale 1ps $end")
    out.append(f"$scope module {module} $end")
    for n in trace.nets:
        out.append(f"$var wire 1 {ids[n]} {n} $end")
    out.append("$upscope $end")
    out.append("$enddefinitions $end")
    out.append("#0")
    out.append("$dumpvars")
    out.extend(f"0{ids[n]}" for n in trace.nets)
    out.append("$end")
    current = 0
    for e in trace.events:
        if e.time != current:
            out.append(f"#{e.time}")
            current = e.time
        out.append(f"{e.level}{ids[e.net]}")
    return ("\n".join(out) + "\n").encode("ascii")
