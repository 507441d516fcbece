"""Event-driven gate-level simulation with inertial delays.

Time is integer picoseconds throughout.  Delays are given in nanoseconds at
the API surface and converted once with :func:`ns_to_ps`.

Two entry points:

* :func:`simulate` applies an explicit ``(time, net, level)`` schedule.
* :func:`run_handshake_cycles` plays a 4-phase return-to-zero environment
  around a circuit whose port groups carry code annotations.  The
  environment watches the output groups (ideal completion detection): once
  every output group is VALID it returns all inputs to spacer, and once every
  output group is SPACER it applies the next vector.
"""
from __future__ import annotations

import hashlib
import heapq
from dataclasses import dataclass, field
from typing import (Any, Dict, Iterable, List, Mapping, NamedTuple, Optional,
                    Sequence, Tuple, Union)

import numpy as np

from .codes import CodeClass, decode_dual_rail, decode_one_of_four
from .errors import (NetlistSyntaxError, OscillationError, ProtocolViolation,
                     SimulationError, StructuralError)
from .netlist import Circuit, GateKind, PortGroup, check_circuit

OSCILLATION_BOUND = 64


def ns_to_ps(ns: float) -> int:
    ps = int(round(float(ns) * 1000))
    if ps < 0:
        raise ValueError(f"delay must be non-negative, got {ns} ns")
    return ps


def ps_to_ns(ps: int) -> float:
    return ps / 1000.0


# -- delays -------------------------------------------------------------------

@dataclass(frozen=True)
class DelayTable:
    """Per-kind rise/fall propagation delays, stored in picoseconds."""

    rise: Mapping[GateKind, int]
    fall: Mapping[GateKind, int]

    def __post_init__(self):
        for kind in GateKind:
            for table in (self.rise, self.fall):
                if kind not in table:
                    raise ValueError(f"delay table has no entry for {kind}")
                if table[kind] < 0:
                    raise ValueError(f"negative delay for {kind}")

    @classmethod
    def from_ns(cls, delays: Mapping[Any, Union[float, Tuple[float, float]]]) -> "DelayTable":
        rise, fall = {}, {}
        for kind, value in delays.items():
            kind = GateKind(kind)
            r, f = value if isinstance(value, (tuple, list)) else (value, value)
            rise[kind], fall[kind] = ns_to_ps(r), ns_to_ps(f)
        return cls(rise, fall)

    @classmethod
    def default(cls) -> "DelayTable":
        # OR2 + AO22 + C2 = 0.238 ns; adding AO21 gives 0.301 ns
        return cls.from_ns({
            GateKind.OR2: 0.070,
            GateKind.AO22: 0.090,
            GateKind.C2: 0.078,
            GateKind.AO21: 0.063,
            GateKind.AO222: 0.090,
        })

    @classmethod
    def zero(cls) -> "DelayTable":
        return cls.from_ns({k: 0.0 for k in GateKind})

    def delay(self, kind, rising: bool) -> int:
        kind = GateKind(kind)
        return self.rise[kind] if rising else self.fall[kind]

    def scaled(self, factor: float) -> "DelayTable":
        return DelayTable({k: int(round(v * factor)) for k, v in self.rise.items()},
                          {k: int(round(v * factor)) for k, v in self.fall.items()})

    def with_delay(self, kind, rise_ns=None, fall_ns=None) -> "DelayTable":
        kind = GateKind(kind)
        rise, fall = dict(self.rise), dict(self.fall)
        if rise_ns is not None:
            rise[kind] = ns_to_ps(rise_ns)
        if fall_ns is not None:
            fall[kind] = ns_to_ps(fall_ns)
        return DelayTable(rise, fall)

    def to_text(self) -> str:
        return "".join(f"{k.value} {self.rise[k] / 1000:.3f} {self.fall[k] / 1000:.3f}\n"
                       for k in GateKind)

    @classmethod
    def from_text(cls, text: str) -> "DelayTable":
        """Parse lines ``<gatekind> <rise_ns> <fall_ns>``; missing kinds use the default."""
        base = cls.default()
        rise, fall = dict(base.rise), dict(base.fall)
        for lineno, raw in enumerate(text.splitlines(), start=1):
            tokens = raw.split("#", 1)[0].split()
            if not tokens:
                continue
            if len(tokens) != 3:
                raise NetlistSyntaxError("expected '<gatekind> <rise_ns> <fall_ns>'", lineno)
            try:
                kind = GateKind(tokens[0].lower())
                rise[kind], fall[kind] = ns_to_ps(tokens[1]), ns_to_ps(tokens[2])
            except ValueError as exc:
                raise NetlistSyntaxError(str(exc), lineno) from None
        return cls(rise, fall)

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:12]


GateDelays = Dict[str, Tuple[int, int]]  # gate output net -> (rise_ps, fall_ps)


@dataclass(frozen=True)
class FixedDelays:
    table: DelayTable

    def resolve(self, circuit: Circuit) -> GateDelays:
        t = self.table
        return {g.output: (t.rise[g.kind], t.fall[g.kind]) for g in circuit.gates}

    def describe(self) -> str:
        return f"fixed table={self.table.digest()}"


@dataclass(frozen=True)
class RandomBoundedDelays:
    """Independent uniform integer-ps draws per gate and direction in [lo, hi]."""

    lo: DelayTable
    hi: DelayTable
    seed: int

    def __post_init__(self):
        for k in GateKind:
            if self.lo.rise[k] > self.hi.rise[k] or self.lo.fall[k] > self.hi.fall[k]:
                raise ValueError(f"lo > hi for {k}")

    def resolve(self, circuit: Circuit) -> GateDelays:
        rng = np.random.default_rng(self.seed)
        out = {}
        for g in circuit.gates:
            k = g.kind
            r = int(rng.integers(self.lo.rise[k], self.hi.rise[k], endpoint=True))
            f = int(rng.integers(self.lo.fall[k], self.hi.fall[k], endpoint=True))
            out[g.output] = (r, f)
        return out

    def describe(self) -> str:
        return f"random lo={self.lo.digest()} hi={self.hi.digest()} seed={self.seed}"


@dataclass(frozen=True)
class OverrideDelays:
    """A base model with selected gates (by output net) given explicit delays.

    ``overrides`` maps a gate id to ``{"rise": ns, "fall": ns}`` (either key
    optional) or to a single number applying to both directions.
    """

    base: Any
    overrides: Mapping[str, Any]

    def resolve(self, circuit: Circuit) -> GateDelays:
        out = as_delay_model(self.base).resolve(circuit)
        for gate_id, spec in self.overrides.items():
            if gate_id not in out:
                raise StructuralError(f"delay override names unknown gate {gate_id!r}")
            rise, fall = out[gate_id]
            if isinstance(spec, Mapping):
                if "rise" in spec:
                    rise = ns_to_ps(spec["rise"])
                if "fall" in spec:
                    fall = ns_to_ps(spec["fall"])
            else:
                rise = fall = ns_to_ps(spec)
            out[gate_id] = (rise, fall)
        return out

    def describe(self) -> str:
        keys = ",".join(sorted(self.overrides))
        return f"{as_delay_model(self.base).describe()} overrides={keys}"


DelayModel = Union[FixedDelays, RandomBoundedDelays, OverrideDelays]


def as_delay_model(model) -> DelayModel:
    if model is None:
        return FixedDelays(DelayTable.default())
    if isinstance(model, DelayTable):
        return FixedDelays(model)
    return model


# -- traces -------------------------------------------------------------------

class Event(NamedTuple):
    time: int
    net: str
    level: int
    cause: Optional[int]  # index of the triggering event; None for stimulus


class CancelledEvent(NamedTuple):
    created: int
    scheduled: int
    net: str
    level: int
    cause: Optional[int]
    cancelled: int


@dataclass
class Phase:
    index: int
    kind: str  # "valid" | "rtz"
    cycle: int
    start: int
    complete: Optional[int] = None
    inputs_done: Optional[int] = None  # last input transition of this phase
    first_event: int = 0  # index of the first trace event applied in this phase

    @property
    def rising(self) -> bool:
        return self.kind == "valid"


@dataclass
class Cycle:
    index: int
    vector: Dict[str, Any]
    outputs: Dict[str, Any] = field(default_factory=dict)
    valid_applied: Optional[int] = None
    valid_complete: Optional[int] = None
    spacer_applied: Optional[int] = None
    spacer_complete: Optional[int] = None

    @property
    def forward_latency(self) -> Optional[int]:
        if self.valid_complete is None:
            return None
        return self.valid_complete - self.valid_applied

    @property
    def reverse_latency(self) -> Optional[int]:
        if self.spacer_complete is None:
            return None
        return self.spacer_complete - self.spacer_applied


@dataclass
class Trace:
    """Applied transitions plus handshake bookkeeping for one run."""

    nets: List[str]
    raw_events: List[Tuple[int, int, int, int]]
    raw_cancelled: List[Tuple[int, int, int, int, int, int]] = field(default_factory=list)
    phases: List[Phase] = field(default_factory=list)
    cycles: List[Cycle] = field(default_factory=list)
    quiescent: bool = True
    end_time: int = 0
    recorded: bool = True
    stimulus_events: int = 0

    def __post_init__(self):
        self._events = None

    @property
    def events(self) -> List[Event]:
        if self._events is None:
            nets = self.nets
            self._events = [Event(t, nets[n], v, None if c < 0 else c)
                            for t, n, v, c in self.raw_events]
        return self._events

    @property
    def cancelled(self) -> List[CancelledEvent]:
        nets = self.nets
        return [CancelledEvent(cr, t, nets[n], v, None if c < 0 else c, x)
                for cr, t, n, v, c, x in self.raw_cancelled]

    def transitions(self, net: str) -> List[Tuple[int, int]]:
        return [(e.time, e.level) for e in self.events if e.net == net]

    def fall_times(self, net: str) -> List[int]:
        return [t for t, v in self.transitions(net) if v == 0]

    def rise_times(self, net: str) -> List[int]:
        return [t for t, v in self.transitions(net) if v == 1]

    def final_levels(self) -> Dict[str, int]:
        levels = {n: 0 for n in self.nets}
        for e in self.events:
            levels[e.net] = e.level
        return levels

    def phase_of_event(self, index: int) -> Optional[Phase]:
        """The handshake phase during which event ``index`` was applied."""
        found = None
        for p in self.phases:
            if p.first_event <= index:
                found = p
            else:
                break
        return found


# -- stimulus -----------------------------------------------------------------

@dataclass
class Stimulus:
    """Either a timed schedule on primary inputs or a list of operand vectors."""

    schedule: List[Tuple[int, str, int]] = field(default_factory=list)
    vectors: List[Tuple[int, ...]] = field(default_factory=list)

    def at(self, time_ps: int, net: str, level: int) -> "Stimulus":
        self.schedule.append((int(time_ps), net, int(level)))
        return self

    def to_text(self) -> str:
        lines = [f"at {t} set {n} {v}" for t, n, v in self.schedule]
        lines += ["vector " + " ".join(str(x) for x in v) for v in self.vectors]
        return "\n".join(lines) + "\n"


def parse_stimulus(text: str) -> Stimulus:
    """Parse ``at <time_ps> set <net> <0|1>`` and ``vector <A> <B> <CIN>`` lines."""
    stim = Stimulus()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        if tokens[0] == "at":
            if len(tokens) != 5 or tokens[2] != "set" or tokens[4] not in ("0", "1"):
                raise NetlistSyntaxError("expected 'at <time_ps> set <net> <0|1>'", lineno)
            try:
                t = int(tokens[1])
            except ValueError:
                raise NetlistSyntaxError(f"bad time {tokens[1]!r}", lineno) from None
            if t < 0:
                raise NetlistSyntaxError("time must be non-negative", lineno)
            stim.at(t, tokens[3], int(tokens[4]))
        elif tokens[0] == "vector":
            if len(tokens) < 2:
                raise NetlistSyntaxError("expected 'vector <values...>'", lineno)
            try:
                stim.vectors.append(tuple(int(x, 0) for x in tokens[1:]))
            except ValueError:
                raise NetlistSyntaxError(f"bad vector value in {raw.strip()!r}", lineno) from None
        else:
            raise NetlistSyntaxError(f"unknown stimulus statement {tokens[0]!r}", lineno)
    if stim.schedule and stim.vectors:
        raise NetlistSyntaxError("stimulus mixes 'at' and 'vector' statements")
    return stim


# -- group encoding -------------------------------------------------------------

def group_rails(group: PortGroup, value) -> Tuple[int, ...]:
    """Rail levels carrying ``value`` on ``group`` (``None`` means spacer)."""
    if value is None:
        return (0,) * len(group.nets)
    if group.encoding == "dualrail":
        if value not in (0, 1):
            raise ValueError(f"group {group.name}: dual-rail value must be 0/1, got {value!r}")
        return (value, 1 - value)
    if group.encoding == "oneof4":
        if isinstance(value, (tuple, list)):
            x, y = value
            if x not in (0, 1) or y not in (0, 1):
                raise ValueError(f"group {group.name}: bad 1-of-4 pair {value!r}")
            index = 2 * x + y
        else:
            index = int(value)
            if not 0 <= index <= 3:
                raise ValueError(f"group {group.name}: 1-of-4 index out of range: {value!r}")
        rails = [0, 0, 0, 0]
        rails[index] = 1
        return tuple(rails)
    if value not in (0, 1):
        raise ValueError(f"group {group.name}: bare value must be 0/1, got {value!r}")
    return (value,)


def decode_group(group: PortGroup, rails: Sequence[int]):
    if group.encoding == "dualrail":
        return decode_dual_rail(rails)
    if group.encoding == "oneof4":
        return decode_one_of_four(rails)
    return rails[0]


# -- engine -------------------------------------------------------------------

_OR2, _AO21, _AO22, _AO222, _C2 = range(5)
_KIND_CODE = {GateKind.OR2: _OR2, GateKind.AO21: _AO21, GateKind.AO22: _AO22,
              GateKind.AO222: _AO222, GateKind.C2: _C2}


class _Compiled:
    """Index-based view of a circuit for the inner loop."""

    def __init__(self, circuit: Circuit, delays: GateDelays):
        check_circuit(circuit)
        self.circuit = circuit
        self.nets = list(circuit.nets)
        self.index = {n: i for i, n in enumerate(self.nets)}
        idx = self.index
        self.kind = []
        self.ins = []
        self.out = []
        self.rise = []
        self.fall = []
        fanout: List[List[int]] = [[] for _ in self.nets]
        for gi, g in enumerate(circuit.gates):
            self.kind.append(_KIND_CODE[g.kind])
            self.ins.append(tuple(idx[i] for i in g.inputs))
            self.out.append(idx[g.output])
            r, f = delays[g.output]
            self.rise.append(r)
            self.fall.append(f)
            for i in dict.fromkeys(g.inputs):
                fanout[idx[i]].append(gi)
        self.fanout = [tuple(f) for f in fanout]
        self.driven = set(self.out)


class _Env:
    """State of the handshake environment inside a run."""

    def __init__(self, compiled: _Compiled, vectors, rtz_skew, env_delay):
        circuit = compiled.circuit
        idx = compiled.index
        self.inputs = circuit.input_groups
        self.outputs = circuit.output_groups
        if not self.outputs:
            raise StructuralError("handshake mode needs at least one output group")
        if not self.inputs:
            raise StructuralError("handshake mode needs at least one input group")
        self.vectors = [dict(v) for v in vectors]
        self.rail_sets = []
        for v in self.vectors:
            missing = [g.name for g in self.inputs if g.name not in v]
            if missing:
                raise ValueError(f"vector {v!r} has no value for input groups {missing}")
            high = []
            for g in self.inputs:
                for net, lvl in zip(g.nets, group_rails(g, v[g.name])):
                    if lvl:
                        high.append(idx[net])
            self.rail_sets.append(high)
        self.in_group_nets = [[idx[n] for n in g.nets] for g in self.inputs]
        self.skew = [int(rtz_skew.get(g.name, 0)) for g in self.inputs]
        unknown = set(rtz_skew) - {g.name for g in self.inputs}
        if unknown:
            raise ValueError(f"rtz_skew names unknown input groups {sorted(unknown)}")
        self.env_delay = int(env_delay)
        self.out_nets = [[idx[n] for n in g.nets] for g in self.outputs]
        groups_of = [()] * len(compiled.nets)
        for gi, nets in enumerate(self.out_nets):
            for n in nets:
                groups_of[n] = groups_of[n] + (gi,)
        self.groups_of = groups_of


def _run(compiled: _Compiled, schedule, horizon, record, oscillation_bound,
         env: Optional[_Env] = None) -> Trace:
    nets = compiled.nets
    n_nets = len(nets)
    lv = [0] * n_nets
    pend_seq = [0] * n_nets
    pend_val = [0] * n_nets
    pend_created = [0] * n_nets
    pend_time = [0] * n_nets
    pend_cause = [-1] * n_nets
    kind, ins, out, rise, fall, fanout = (compiled.kind, compiled.ins, compiled.out,
                                          compiled.rise, compiled.fall, compiled.fanout)
    events: List[Tuple[int, int, int, int]] = []
    cancelled: List[Tuple[int, int, int, int, int, int]] = []
    trace = Trace(list(nets), events, cancelled, recorded=record)
    heap: List[tuple] = []
    push, pop = heapq.heappush, heapq.heappop
    # stimulus keys are negative (ahead of gate events at the same instant)
    # and increasing, so same-instant stimuli apply in the order given
    stim_seq = -(1 << 62)
    for t, n, v in schedule:
        stim_seq += 1
        push(heap, (t, stim_seq, n, v, -1))
    seq = 0
    toggles = [0] * n_nets
    last_stim_time = None

    # handshake environment state
    phase = None
    if env is not None:
        groups_of = env.groups_of
        n_out = len(env.out_nets)
        high = [0] * n_out
        n_spacer = n_out
        n_valid = 0
        vec_i = 0
        cycle = None

        def apply_vector(t):
            nonlocal stim_seq, phase, cycle
            for n in env.rail_sets[vec_i]:
                stim_seq += 1
                push(heap, (t, stim_seq, n, 1, -1))
            phase = Phase(len(trace.phases), "valid", vec_i, t, inputs_done=t,
                          first_event=len(events))
            trace.phases.append(phase)
            cycle = Cycle(vec_i, env.vectors[vec_i], valid_applied=t)
            trace.cycles.append(cycle)

        apply_vector(0)
    else:
        groups_of = None

    t = 0
    n_stim = 0
    while heap:
        t, s, net, val, cause = pop(heap)
        if horizon is not None and t > horizon:
            trace.quiescent = False
            t = horizon
            break
        if s < 0:
            if lv[net] == val:
                continue
            if net in compiled.driven:
                raise SimulationError(f"stimulus drives gate output {nets[net]!r}")
            n_stim += 1
            if env is None and t != last_stim_time:
                # a new stimulus instant opens a new oscillation window
                last_stim_time = t
                toggles = [0] * n_nets
        else:
            if pend_seq[net] != s:
                continue
            pend_seq[net] = 0
        lv[net] = val
        toggles[net] += 1
        if toggles[net] > oscillation_bound:
            raise OscillationError(
                f"net {nets[net]!r} toggled more than {oscillation_bound} times "
                f"within one phase (t={t} ps)")
        if record:
            events.append((t, net, val, cause))
            ci = len(events) - 1
        else:
            ci = -1

        for g in fanout[net]:
            k = kind[g]
            i = ins[g]
            if k == _OR2:
                v = lv[i[0]] | lv[i[1]]
            elif k == _C2:
                v = lv[i[0]]
                if v != lv[i[1]]:
                    v = lv[out[g]]  # hold; still withdraws a pending change
            elif k == _AO22:
                v = (lv[i[0]] & lv[i[1]]) | (lv[i[2]] & lv[i[3]])
            elif k == _AO21:
                v = (lv[i[0]] & lv[i[1]]) | lv[i[2]]
            else:
                v = (lv[i[0]] & lv[i[1]]) | (lv[i[2]] & lv[i[3]]) | (lv[i[4]] & lv[i[5]])
            o = out[g]
            if pend_seq[o]:
                if v == pend_val[o]:
                    continue
                # input reverted before the output moved: inertial cancel
                pend_seq[o] = 0
                if record:
                    cancelled.append((pend_created[o], pend_time[o], o, pend_val[o],
                                      pend_cause[o], t))
                continue
            if v == lv[o]:
                continue
            seq += 1
            when = t + (rise[g] if v else fall[g])
            push(heap, (when, seq, o, v, ci))
            pend_seq[o] = seq
            pend_val[o] = v
            if record:
                pend_created[o] = t
                pend_time[o] = when
                pend_cause[o] = ci

        if env is None or not groups_of[net]:
            continue
        for gi in groups_of[net]:
            before = high[gi]
            after = before + (1 if val else -1)
            high[gi] = after
            if before == 0:
                n_spacer -= 1
            elif before == 1:
                n_valid -= 1
            if after == 0:
                n_spacer += 1
            elif after == 1:
                n_valid += 1
            else:
                tail = trace.events[-20:] if record else []
                raise ProtocolViolation(
                    f"output group {env.outputs[gi].name!r} became INVALID at t={t} ps "
                    f"(cycle {vec_i})", tail)
        if phase is None or phase.complete is not None:
            continue
        if phase.kind == "valid" and n_valid == n_out:
            phase.complete = t
            cycle.valid_complete = t
            cycle.outputs = {g.name: decode_group(g, [lv[n] for n in nets_])
                             for g, nets_ in zip(env.outputs, env.out_nets)}
            start = t + env.env_delay
            last = start
            for gnets, skew in zip(env.in_group_nets, env.skew):
                for n in gnets:
                    if lv[n]:
                        stim_seq += 1
                        push(heap, (start + skew, stim_seq, n, 0, -1))
                        last = max(last, start + skew)
            phase = Phase(len(trace.phases), "rtz", vec_i, start, inputs_done=last,
                          first_event=len(events))
            trace.phases.append(phase)
            cycle.spacer_applied = start
            toggles = [0] * n_nets
        elif phase.kind == "rtz" and n_spacer == n_out:
            phase.complete = t
            cycle.spacer_complete = t
            vec_i += 1
            if vec_i < len(env.vectors):
                apply_vector(max(t + env.env_delay, phase.inputs_done))
                toggles = [0] * n_nets

    trace.end_time = t
    trace.stimulus_events = n_stim
    if env is not None and trace.quiescent:
        if phase is not None and phase.complete is None:
            raise ProtocolViolation(
                f"handshake stalled in {phase.kind} phase of cycle {phase.cycle} "
                f"at t={t} ps", trace.events[-20:] if record else [])
    return trace


def simulate(circuit: Circuit, stimulus, delay_model=None, horizon: Optional[int] = None,
             *, record: bool = True, oscillation_bound: int = OSCILLATION_BOUND) -> Trace:
    """Run an explicit stimulus schedule.

    ``stimulus`` is a :class:`Stimulus` or an iterable of ``(time_ps, net,
    level)``.  ``horizon`` (ps) stops the run early and clears
    ``Trace.quiescent`` if events were still pending.
    """
    if horizon is not None and horizon <= 0:
        raise ValueError("horizon must be positive")
    schedule = stimulus.schedule if isinstance(stimulus, Stimulus) else list(stimulus)
    compiled = _Compiled(circuit, as_delay_model(delay_model).resolve(circuit))
    inputs = set(circuit.primary_inputs)
    sched = []
    for t, n, v in schedule:
        if n not in compiled.index:
            raise StructuralError(f"stimulus names unknown net {n!r}")
        if n not in inputs:
            raise StructuralError(f"stimulus may only drive primary inputs, not {n!r}")
        if v not in (0, 1):
            raise ValueError(f"stimulus level must be 0/1, got {v!r}")
        sched.append((int(t), compiled.index[n], v))
    return _run(compiled, sched, horizon, record, oscillation_bound)


def run_handshake_cycles(circuit: Circuit, vectors: Sequence[Mapping[str, Any]],
                         delay_model=None, *, env_delay: int = 0,
                         rtz_skew: Optional[Mapping[str, int]] = None,
                         record: bool = True, horizon: Optional[int] = None,
                         oscillation_bound: int = OSCILLATION_BOUND) -> Tuple[Trace, List[Cycle]]:
    """Drive ``vectors`` through a 4-phase RTZ handshake.

    Each vector maps input group name to its value (bit for dual-rail and
    bare groups, ``(x, y)`` or rail index for 1-of-4).  ``env_delay`` is the
    environment's reaction time in ps; ``rtz_skew`` delays the spacer of
    individual input groups (ps after the environment's RTZ instant).

    Returns the trace and its per-cycle records (decoded outputs and the
    four handshake instants); :func:`asyncadder.analysis.measure_latency`
    turns them into aggregate metrics.
    """
    if not vectors:
        raise ValueError("need at least one vector")
    compiled = _Compiled(circuit, as_delay_model(delay_model).resolve(circuit))
    env = _Env(compiled, vectors, dict(rtz_skew or {}), env_delay)
    trace = _run(compiled, [], horizon, record, oscillation_bound, env)
    return trace, trace.cycles
