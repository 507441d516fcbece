"""Gate-and-net circuit graphs, gate evaluation and the textual netlist format.

Netlist text format (line oriented, ``#`` starts a comment)::

    net <name>
    input  <group> dualrail <w1> <w0>
    input  <group> oneof4 <f0> <f1> <f2> <f3>
    input  <group> bare <net>
    output <group> ...                      (same encodings as input)
    gate <kind> <in1> ... <inK> -> <out>    kind in or2, ao21, ao22, ao222, c2

Input ordering per kind is significant:

* ``or2 a b``                 out = a + b
* ``ao21 a b c``              out = a.b + c
* ``ao22 a b c d``            out = a.b + c.d
* ``ao222 a b c d e f``       out = a.b + c.d + e.f
* ``c2 a b``                  Muller C-element

A gate is identified by the name of the net it drives.
"""
from __future__ import annotations

import enum
import graphlib
import warnings
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import NetlistSyntaxError, StructuralError

HEADER = "# asyncadder netlist v1"


class GateKind(str, enum.Enum):
    OR2 = "or2"
    AO21 = "ao21"
    AO22 = "ao22"
    AO222 = "ao222"
    C2 = "c2"

    def __str__(self):
        return self.value


ARITY = {
    GateKind.OR2: 2,
    GateKind.AO21: 3,
    GateKind.AO22: 4,
    GateKind.AO222: 6,
    GateKind.C2: 2,
}

ENCODING_WIDTH = {"dualrail": 2, "oneof4": 4, "bare": 1}


def eval_gate(kind: GateKind, inputs: Sequence[int], prev: int = 0) -> int:
    """Evaluate one gate.  ``prev`` is only consulted by the C-element."""
    kind = GateKind(kind)
    if len(inputs) != ARITY[kind]:
        raise StructuralError(
            f"{kind} takes {ARITY[kind]} inputs, got {len(inputs)}")
    if kind is GateKind.OR2:
        return inputs[0] | inputs[1]
    if kind is GateKind.AO21:
        return (inputs[0] & inputs[1]) | inputs[2]
    if kind is GateKind.AO22:
        return (inputs[0] & inputs[1]) | (inputs[2] & inputs[3])
    if kind is GateKind.AO222:
        return ((inputs[0] & inputs[1]) | (inputs[2] & inputs[3])
                | (inputs[4] & inputs[5]))
    # C2: set when both high, reset when both low, hold otherwise
    if inputs[0] == inputs[1]:
        return inputs[0]
    return prev


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    inputs: Tuple[str, ...]
    output: str

    @property
    def name(self) -> str:
        return self.output

    @property
    def is_c_element_feedback(self) -> bool:
        """True for the AO222 pattern (a,b),(a,out),(b,out) realizing a C2."""
        if self.kind is not GateKind.AO222:
            return False
        a, b, a2, o1, b2, o2 = self.inputs
        return (a == a2 and b == b2 and o1 == self.output
                and o2 == self.output and self.output not in (a, b))


@dataclass(frozen=True)
class PortGroup:
    name: str
    direction: str  # "input" | "output"
    encoding: str  # "dualrail" | "oneof4" | "bare"
    nets: Tuple[str, ...]


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str

    def __str__(self):
        return f"{self.code}: {self.message}"


@dataclass
class Circuit:
    """A gate-level netlist.

    Built incrementally with :meth:`add_net`, :meth:`add_gate` and
    :meth:`add_group`; treat it as read-only once it is handed to the
    simulator or analyses.  Every net starts at 0 (global spacer).
    """

    name: str = "circuit"
    nets: List[str] = field(default_factory=list)
    gates: List[Gate] = field(default_factory=list)
    groups: List[PortGroup] = field(default_factory=list)

    def __post_init__(self):
        self._net_set = set(self.nets)

    # -- construction -----------------------------------------------------
    def add_net(self, name: str) -> str:
        if name in self._net_set:
            raise StructuralError(f"duplicate net name {name!r}")
        self.nets.append(name)
        self._net_set.add(name)
        return name

    def ensure_net(self, name: str) -> str:
        if name not in self._net_set:
            self.add_net(name)
        return name

    def add_gate(self, kind, inputs: Sequence[str], output: str) -> Gate:
        kind = GateKind(kind)
        if len(inputs) != ARITY[kind]:
            raise StructuralError(
                f"{kind} driving {output!r} takes {ARITY[kind]} inputs, "
                f"got {len(inputs)}")
        gate = Gate(kind, tuple(inputs), output)
        self.gates.append(gate)
        return gate

    def add_group(self, name: str, direction: str, encoding: str,
                  nets: Sequence[str]) -> PortGroup:
        if direction not in ("input", "output"):
            raise StructuralError(f"bad port direction {direction!r}")
        if encoding not in ENCODING_WIDTH:
            raise StructuralError(f"unknown encoding {encoding!r}")
        if len(nets) != ENCODING_WIDTH[encoding]:
            raise StructuralError(
                f"{encoding} group {name!r} needs {ENCODING_WIDTH[encoding]} "
                f"nets, got {len(nets)}")
        if any(g.name == name for g in self.groups):
            raise StructuralError(f"duplicate port group {name!r}")
        group = PortGroup(name, direction, encoding, tuple(nets))
        self.groups.append(group)
        return group

    # -- queries ----------------------------------------------------------
    def has_net(self, name: str) -> bool:
        return name in self._net_set

    @property
    def drivers(self) -> Dict[str, Gate]:
        return {g.output: g for g in self.gates}

    def gate(self, output: str) -> Gate:
        for g in self.gates:
            if g.output == output:
                return g
        raise KeyError(output)

    def group(self, name: str) -> PortGroup:
        for g in self.groups:
            if g.name == name:
                return g
        raise KeyError(name)

    @property
    def input_groups(self) -> List[PortGroup]:
        return [g for g in self.groups if g.direction == "input"]

    @property
    def output_groups(self) -> List[PortGroup]:
        return [g for g in self.groups if g.direction == "output"]

    @property
    def primary_inputs(self) -> List[str]:
        driven = {g.output for g in self.gates}
        return [n for n in self.nets if n not in driven]

    def fanout(self) -> Dict[str, List[Gate]]:
        out: Dict[str, List[Gate]] = {n: [] for n in self.nets}
        for g in self.gates:
            for i in dict.fromkeys(g.inputs):
                out.setdefault(i, []).append(g)
        return out

    def merge(self, other: "Circuit") -> None:
        """Add another circuit's nets, gates and groups (shared net names join)."""
        for n in other.nets:
            self.ensure_net(n)
        self.gates.extend(other.gates)
        for g in other.groups:
            self.add_group(g.name, g.direction, g.encoding, g.nets)

    def gate_counts(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for g in self.gates:
            counts[g.kind.value] = counts.get(g.kind.value, 0) + 1
        return counts


def validate_circuit(circuit: Circuit) -> List[Diagnostic]:
    """Return structural diagnostics; an empty list means the circuit is usable."""
    diags: List[Diagnostic] = []
    declared = set(circuit.nets)
    drivers: Dict[str, Gate] = {}
    for g in circuit.gates:
        if len(g.inputs) != ARITY[g.kind]:
            diags.append(Diagnostic(
                "arity", f"{g.kind} driving {g.output} has {len(g.inputs)} inputs"))
        for i in g.inputs:
            if i not in declared:
                diags.append(Diagnostic(
                    "dangling-input",
                    f"gate driving {g.output} reads undeclared net {i!r}"))
        if g.output not in declared:
            diags.append(Diagnostic(
                "undeclared-output", f"gate output {g.output!r} is not declared"))
        if g.output in drivers:
            diags.append(Diagnostic(
                "multiple-drivers", f"net {g.output!r} is driven by more than one gate"))
        else:
            drivers[g.output] = g
    for grp in circuit.groups:
        for n in grp.nets:
            if n not in declared:
                diags.append(Diagnostic(
                    "unknown-port-net",
                    f"port group {grp.name!r} references undeclared net {n!r}"))
            elif grp.direction == "input" and n in drivers:
                diags.append(Diagnostic(
                    "driven-input", f"input net {n!r} of group {grp.name!r} is driven by a gate"))
    diags.extend(_cycle_diagnostics(circuit))
    return diags


def combinational_arcs(circuit: Circuit) -> Iterable[Tuple[str, str, Gate]]:
    """Yield (input net, output net, gate) arcs with C-element feedback broken.

    Behavioral C2 arcs are kept (a C2 counts once, input to output); only the
    self-arcs of the AO222 feedback realization are dropped.
    """
    for g in circuit.gates:
        feedback = g.is_c_element_feedback
        for i in dict.fromkeys(g.inputs):
            if feedback and i == g.output:
                continue
            yield i, g.output, g


def _cycle_diagnostics(circuit: Circuit) -> List[Diagnostic]:
    # cycles are legal only when they pass through a state-holding element
    graph: Dict[str, set] = {}
    for src, dst, g in combinational_arcs(circuit):
        if g.kind is GateKind.C2:
            continue
        graph.setdefault(dst, set()).add(src)
    try:
        tuple(graphlib.TopologicalSorter(graph).static_order())
    except graphlib.CycleError as exc:
        cycle = exc.args[1]
        return [Diagnostic("combinational-cycle",
                           "combinational loop through " + " -> ".join(reversed(cycle)))]
    return []


def check_circuit(circuit: Circuit) -> None:
    diags = validate_circuit(circuit)
    if diags:
        raise StructuralError("; ".join(str(d) for d in diags))


def build_c2_from_ao222(circuit: Circuit, a: str, b: str, out: str) -> Gate:
    """Emit a C-element as an AO222 gate with its output fed back.

    out = a.b + a.out + b.out
    """
    for n in (a, b, out):
        circuit.ensure_net(n)
    return circuit.add_gate(GateKind.AO222, (a, b, a, out, b, out), out)


def expand_c_elements(circuit: Circuit) -> Circuit:
    """Copy of ``circuit`` with every behavioral C2 replaced by AO222 feedback."""
    out = Circuit(circuit.name, list(circuit.nets), [], list(circuit.groups))
    for g in circuit.gates:
        if g.kind is GateKind.C2:
            build_c2_from_ao222(out, g.inputs[0], g.inputs[1], g.output)
        else:
            out.gates.append(g)
    return out


# -- text format --------------------------------------------------------------

def parse_netlist(text: str, name: str = "circuit") -> Circuit:
    circuit = Circuit(name)
    pending_gates = []
    saw_statement = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = line.split()
        if not tokens:
            continue
        saw_statement = True
        col = raw.index(tokens[0]) + 1
        keyword = tokens[0]
        if keyword == "net":
            if len(tokens) != 2:
                raise NetlistSyntaxError("expected 'net <name>'", lineno, col)
            if circuit.has_net(tokens[1]):
                raise NetlistSyntaxError(
                    f"duplicate net name {tokens[1]!r}", lineno, raw.index(tokens[1], col) + 1)
            circuit.add_net(tokens[1])
        elif keyword in ("input", "output"):
            if len(tokens) < 4:
                raise NetlistSyntaxError(
                    f"expected '{keyword} <group> <encoding> <nets...>'", lineno, col)
            encoding = tokens[2]
            if encoding not in ENCODING_WIDTH:
                raise NetlistSyntaxError(
                    f"unknown encoding {encoding!r}", lineno, raw.index(encoding, col) + 1)
            nets = tokens[3:]
            if len(nets) != ENCODING_WIDTH[encoding]:
                raise NetlistSyntaxError(
                    f"{encoding} group needs {ENCODING_WIDTH[encoding]} nets, got {len(nets)}",
                    lineno, col)
            try:
                circuit.add_group(tokens[1], keyword, encoding, nets)
            except StructuralError as exc:
                raise NetlistSyntaxError(str(exc), lineno, col) from None
        elif keyword == "gate":
            if len(tokens) < 4 or "->" not in tokens:
                raise NetlistSyntaxError("expected 'gate <kind> <inputs...> -> <out>'", lineno, col)
            arrow = tokens.index("->")
            try:
                kind = GateKind(tokens[1].lower())
            except ValueError:
                raise NetlistSyntaxError(
                    f"unknown gate kind {tokens[1]!r}", lineno, raw.index(tokens[1], col) + 1) from None
            ins = tokens[2:arrow]
            outs = tokens[arrow + 1:]
            if len(outs) != 1:
                raise NetlistSyntaxError(
                    "exactly one output net must follow '->'", lineno, raw.index("->") + 1)
            if len(ins) != ARITY[kind]:
                raise NetlistSyntaxError(
                    f"{kind} takes {ARITY[kind]} inputs, got {len(ins)}", lineno, col)
            pending_gates.append((lineno, col, kind, ins, outs[0]))
        else:
            raise NetlistSyntaxError(f"unknown statement {keyword!r}", lineno, col)

    for lineno, col, kind, ins, out in pending_gates:
        for n in (*ins, out):
            if not circuit.has_net(n):
                raise NetlistSyntaxError(f"undeclared net {n!r}", lineno, col)
        circuit.add_gate(kind, ins, out)

    if not saw_statement:
        warnings.warn("netlist is empty", NetlistWarning, stacklevel=2)
    check_circuit(circuit)
    return circuit


class NetlistWarning(UserWarning):
    pass


def emit_netlist(circuit: Circuit) -> str:
    lines = [HEADER]
    lines.extend(f"net {n}" for n in circuit.nets)
    lines.extend(f"{g.direction} {g.name} {g.encoding} {' '.join(g.nets)}"
                 for g in circuit.groups)
    lines.extend(f"gate {g.kind.value} {' '.join(g.inputs)} -> {g.output}"
                 for g in circuit.gates)
    return "\n".join(lines) + "\n"
