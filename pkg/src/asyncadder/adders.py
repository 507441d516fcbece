"""Generators for the hybrid input encoded early-output adder circuits.

Net names are stage-indexed: stage ``i`` of an RCA owns ``E0_i..E3_i``,
``int1_i``, ``int2_i``, ``int3_i``, ``isum1_i``, ``isum0_i``, ``SUM1_i``,
``SUM0_i``, ``COUT1_i`` and ``COUT0_i``.  Stage 0 reads the primary carry
``CIN1_0``/``CIN0_0``; stage ``i > 0`` reads ``COUT1_{i-1}``/``COUT0_{i-1}``.
With encoders the operand rails are ``A1_i, A0_i, B1_i, B0_i``.

Gate labels used in the original schematic (see :data:`GATE_LABELS`):

=========  =====  ====================================
net        label  function
=========  =====  ====================================
E0..E3     CE1-4  C(A0,B0), C(A0,B1), C(A1,B0), C(A1,B1)
int1       OR1    E0 + E3
int2       OR2    E1 + E2
int3       OR3    int1 + int2
isum1      CG1    int2.CIN0 + int1.CIN1   (AO22)
isum0      CG2    int2.CIN1 + int1.CIN0   (AO22)
COUT1      CG3    int2.CIN1 + E3          (AO21)
COUT0      CG4    int2.CIN0 + E0          (AO21)
SUM1       C1     C(isum1, int3)
SUM0       C2     C(isum0, int3)
=========  =====  ====================================
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .errors import StructuralError
from .netlist import Circuit, GateKind, PortGroup, build_c2_from_ao222

GATE_LABELS = {
    "E0": "CE1", "E1": "CE2", "E2": "CE3", "E3": "CE4",
    "int1": "OR1", "int2": "OR2", "int3": "OR3",
    "isum1": "CG1", "isum0": "CG2", "COUT1": "CG3", "COUT0": "CG4",
    "SUM1": "C1", "SUM0": "C2",
}

# Sum-of-products forms of the four outputs over the 1-of-4 operand code
# and the dual-rail carry.  A term is a tuple of literal names.
FA_EQUATIONS: Dict[str, Tuple[Tuple[str, ...], ...]] = {
    "SUM1": (("E1", "CIN0"), ("E2", "CIN0"), ("E0", "CIN1"), ("E3", "CIN1")),
    "SUM0": (("E1", "CIN1"), ("E2", "CIN1"), ("E0", "CIN0"), ("E3", "CIN0")),
    "COUT1": (("E1", "CIN1"), ("E2", "CIN1"), ("E3",)),
    "COUT0": (("E1", "CIN0"), ("E2", "CIN0"), ("E0",)),
}


def gate_label(net: str) -> str:
    """Schematic label of the gate driving ``net`` (e.g. ``COUT0_1`` -> ``CG4_1``)."""
    base, _, stage = net.rpartition("_")
    if base in GATE_LABELS:
        return f"{GATE_LABELS[base]}_{stage}"
    return net


@dataclass(frozen=True)
class FullAdderPorts:
    stage: int
    e0: str
    e1: str
    e2: str
    e3: str
    cin1: str
    cin0: str
    sum1: str
    sum0: str
    cout1: str
    cout0: str
    int1: str
    int2: str
    int3: str
    isum1: str
    isum0: str

    @classmethod
    def for_stage(cls, i: int, cin1: Optional[str] = None,
                  cin0: Optional[str] = None) -> "FullAdderPorts":
        return cls(
            stage=i,
            e0=f"E0_{i}", e1=f"E1_{i}", e2=f"E2_{i}", e3=f"E3_{i}",
            cin1=cin1 or f"CIN1_{i}", cin0=cin0 or f"CIN0_{i}",
            sum1=f"SUM1_{i}", sum0=f"SUM0_{i}",
            cout1=f"COUT1_{i}", cout0=f"COUT0_{i}",
            int1=f"int1_{i}", int2=f"int2_{i}", int3=f"int3_{i}",
            isum1=f"isum1_{i}", isum0=f"isum0_{i}",
        )

    @property
    def e(self) -> Tuple[str, str, str, str]:
        return (self.e0, self.e1, self.e2, self.e3)

    def literal(self, name: str) -> str:
        """Net carrying an equation literal (``E0``..``E3``, ``CIN1``, ``CIN0``)."""
        return {"E0": self.e0, "E1": self.e1, "E2": self.e2, "E3": self.e3,
                "CIN1": self.cin1, "CIN0": self.cin0,
                "SUM1": self.sum1, "SUM0": self.sum0,
                "COUT1": self.cout1, "COUT0": self.cout0}[name]


@dataclass(frozen=True)
class EncoderPorts:
    a1: str
    a0: str
    b1: str
    b0: str
    e0: str
    e1: str
    e2: str
    e3: str


@dataclass(frozen=True)
class RcaDescriptor:
    width: int
    stages: Tuple[FullAdderPorts, ...]
    encoders: Optional[Tuple[EncoderPorts, ...]]
    cin: Tuple[str, str]
    sums: Tuple[Tuple[str, str], ...]
    cout: Tuple[str, str]

    @property
    def has_encoders(self) -> bool:
        return self.encoders is not None

    def vector(self, a: int, b: int, cin: int) -> Dict[str, object]:
        """Input-group values for operands ``a``, ``b`` and carry-in ``cin``."""
        n = self.width
        if not (0 <= a < 1 << n and 0 <= b < 1 << n and cin in (0, 1)):
            raise ValueError(f"operands out of range for a {n}-bit adder: {a}, {b}, {cin}")
        v: Dict[str, object] = {"CIN": cin}
        for i in range(n):
            ai, bi = (a >> i) & 1, (b >> i) & 1
            if self.has_encoders:
                v[f"A_{i}"] = ai
                v[f"B_{i}"] = bi
            else:
                v[f"E_{i}"] = (ai, bi)
        return v

    def decode(self, outputs: Dict[str, object]) -> int:
        """Integer value of (COUT, SUM[n-1..0]) from decoded output groups."""
        total = 0
        for i in range(self.width):
            bit = outputs[f"SUM_{i}"]
            if bit not in (0, 1):
                raise ValueError(f"SUM_{i} is not valid data: {bit}")
            total |= bit << i
        cout = outputs["COUT"]
        if cout not in (0, 1):
            raise ValueError(f"COUT is not valid data: {cout}")
        return total | (cout << self.width)


def _c2(circuit: Circuit, a: str, b: str, out: str, structural: bool) -> None:
    if structural:
        build_c2_from_ao222(circuit, a, b, out)
    else:
        circuit.add_gate(GateKind.C2, (a, b), out)


def build_encoder(circuit: Circuit, a1: str, a0: str, b1: str, b0: str,
                  e0: str, e1: str, e2: str, e3: str,
                  structural_c: bool = False) -> EncoderPorts:
    """Dual-rail A, B to 1-of-4 E through four C-elements (CE1..CE4)."""
    for n in (a1, a0, b1, b0, e0, e1, e2, e3):
        circuit.ensure_net(n)
    _c2(circuit, a0, b0, e0, structural_c)
    _c2(circuit, a0, b1, e1, structural_c)
    _c2(circuit, a1, b0, e2, structural_c)
    _c2(circuit, a1, b1, e3, structural_c)
    return EncoderPorts(a1, a0, b1, b0, e0, e1, e2, e3)


def add_full_adder(circuit: Circuit, p: FullAdderPorts, structural_c: bool = False) -> None:
    """Emit the nine gates of one full-adder stage into ``circuit``."""
    for n in (p.e0, p.e1, p.e2, p.e3, p.cin1, p.cin0, p.int1, p.int2, p.int3,
              p.isum1, p.isum0, p.cout1, p.cout0, p.sum1, p.sum0):
        circuit.ensure_net(n)
    circuit.add_gate(GateKind.OR2, (p.e0, p.e3), p.int1)
    circuit.add_gate(GateKind.OR2, (p.e1, p.e2), p.int2)
    circuit.add_gate(GateKind.OR2, (p.int1, p.int2), p.int3)
    circuit.add_gate(GateKind.AO22, (p.int2, p.cin0, p.int1, p.cin1), p.isum1)
    circuit.add_gate(GateKind.AO22, (p.int2, p.cin1, p.int1, p.cin0), p.isum0)
    circuit.add_gate(GateKind.AO21, (p.int2, p.cin1, p.e3), p.cout1)
    circuit.add_gate(GateKind.AO21, (p.int2, p.cin0, p.e0), p.cout0)
    _c2(circuit, p.isum1, p.int3, p.sum1, structural_c)
    _c2(circuit, p.isum0, p.int3, p.sum0, structural_c)


def build_rca(n: int, include_encoders: bool = True, *, structural_c: bool = False,
              output_detector: bool = False, input_detector: bool = False,
              ) -> Tuple[Circuit, RcaDescriptor]:
    """An ``n``-bit ripple carry adder of early-output full adders.

    Port groups: inputs ``A_i``/``B_i`` (dual-rail, with encoders) or ``E_i``
    (1-of-4, without), ``CIN``; outputs ``SUM_i`` and ``COUT``.  The optional
    detectors add bare output groups ``done_out`` / ``done_in`` that the
    handshake environment then waits on as well.
    """
    if n < 1:
        raise StructuralError(f"adder width must be >= 1, got {n}")
    circuit = Circuit(f"rca{n}")
    stages: List[FullAdderPorts] = []
    encoders: List[EncoderPorts] = []
    cin = ("CIN1_0", "CIN0_0")
    for i in range(n):
        if i == 0:
            p = FullAdderPorts.for_stage(0, *cin)
        else:
            prev = stages[-1]
            p = FullAdderPorts.for_stage(i, prev.cout1, prev.cout0)
        if include_encoders:
            encoders.append(build_encoder(
                circuit, f"A1_{i}", f"A0_{i}", f"B1_{i}", f"B0_{i}", *p.e,
                structural_c=structural_c))
        add_full_adder(circuit, p, structural_c)
        stages.append(p)

    for i, p in enumerate(stages):
        if include_encoders:
            enc = encoders[i]
            circuit.add_group(f"A_{i}", "input", "dualrail", (enc.a1, enc.a0))
            circuit.add_group(f"B_{i}", "input", "dualrail", (enc.b1, enc.b0))
        else:
            circuit.add_group(f"E_{i}", "input", "oneof4", p.e)
    circuit.add_group("CIN", "input", "dualrail", cin)
    for p in stages:
        circuit.add_group(f"SUM_{p.stage}", "output", "dualrail", (p.sum1, p.sum0))
    last = stages[-1]
    circuit.add_group("COUT", "output", "dualrail", (last.cout1, last.cout0))

    if output_detector:
        done = build_completion_detector(circuit, circuit.output_groups, prefix="cdo",
                                         structural_c=structural_c)
        circuit.add_group("done_out", "output", "bare", (done,))
    if input_detector:
        done = build_completion_detector(circuit, circuit.input_groups, prefix="cdi",
                                         structural_c=structural_c)
        circuit.add_group("done_in", "output", "bare", (done,))

    desc = RcaDescriptor(
        width=n,
        stages=tuple(stages),
        encoders=tuple(encoders) if include_encoders else None,
        cin=cin,
        sums=tuple((p.sum1, p.sum0) for p in stages),
        cout=(last.cout1, last.cout0),
    )
    return circuit, desc


def build_full_adder(include_encoder: bool = False, *, structural_c: bool = False) -> Circuit:
    """The single full adder (stage 0 names), optionally with its encoder."""
    circuit, _ = build_rca(1, include_encoder, structural_c=structural_c)
    circuit.name = "full_adder"
    return circuit


GroupLike = Union[PortGroup, Tuple[str, Sequence[str]]]


def build_completion_detector(circuit: Circuit, groups: Sequence[GroupLike],
                              prefix: str = "cd", structural_c: bool = False) -> str:
    """OR each code group's rails, then merge with a balanced C-element tree.

    ``groups`` are port groups or ``(encoding, nets)`` pairs with encoding
    ``dualrail`` or ``oneof4``.  Returns the name of the done net.
    """
    if not groups:
        raise StructuralError("completion detector needs at least one group")
    ors = []
    k = 0

    def or2(a, b):
        nonlocal k
        out = circuit.add_net(f"{prefix}_or{k}")
        k += 1
        circuit.add_gate(GateKind.OR2, (a, b), out)
        return out

    for g in groups:
        encoding, nets = (g.encoding, g.nets) if isinstance(g, PortGroup) else g
        if encoding == "dualrail":
            ors.append(or2(nets[0], nets[1]))
        elif encoding == "oneof4":
            ors.append(or2(or2(nets[0], nets[1]), or2(nets[2], nets[3])))
        else:
            raise StructuralError(f"completion detector cannot watch a {encoding} group")

    level = ors
    c = 0
    while len(level) > 1:
        nxt = []
        for j in range(0, len(level) - 1, 2):
            out = circuit.add_net(f"{prefix}_c{c}")
            c += 1
            _c2(circuit, level[j], level[j + 1], out, structural_c)
            nxt.append(out)
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]


def carry_chain_length(width: int, a: int, b: int) -> int:
    """Longest run of consecutive propagate stages (a_i != b_i)."""
    best = run = 0
    for i in range(width):
        if ((a >> i) ^ (b >> i)) & 1:
            run += 1
            best = max(best, run)
        else:
            run = 0
    return best


def describe_rca(circuit: Circuit) -> RcaDescriptor:
    """Recover the descriptor of an adder built by :func:`build_rca` (e.g. after
    a netlist round trip) from its port-group names."""
    names = {g.name for g in circuit.groups}
    n = 0
    while f"SUM_{n}" in names:
        n += 1
    if n == 0 or "CIN" not in names or "COUT" not in names:
        raise StructuralError("circuit does not look like a generated ripple carry adder")
    encoders = "A_0" in names
    stages = []
    cin = tuple(circuit.group("CIN").nets)
    for i in range(n):
        if i == 0:
            stages.append(FullAdderPorts.for_stage(0, *cin))
        else:
            stages.append(FullAdderPorts.for_stage(i, stages[-1].cout1, stages[-1].cout0))
    enc = None
    if encoders:
        enc = tuple(EncoderPorts(*circuit.group(f"A_{i}").nets, *circuit.group(f"B_{i}").nets,
                                 *stages[i].e) for i in range(n))
    return RcaDescriptor(n, tuple(stages), enc, cin,
                         tuple((p.sum1, p.sum0) for p in stages),
                         tuple(circuit.group("COUT").nets))
