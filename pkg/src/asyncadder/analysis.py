"""Checks over netlists and traces: monotonic cover, indication, orphans,
relative timing, static path delays and handshake latency.

All times are integer picoseconds; reports convert to ns only for display.
"""
from __future__ import annotations

import bisect
import graphlib
import itertools
import json
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .adders import (FA_EQUATIONS, FullAdderPorts, RcaDescriptor, build_rca,
                     carry_chain_length, gate_label)
from .codes import CodeClass
from .errors import StructuralError
from .netlist import Circuit, GateKind, PortGroup, combinational_arcs
from .sim import (Cycle, DelayTable, FixedDelays, GateDelays, OverrideDelays, Trace,
                  as_delay_model, group_rails, ps_to_ns, simulate)


class _Report:
    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=str)


# -- static path analysis -----------------------------------------------------

def _gate_delays(circuit: Circuit, delays) -> GateDelays:
    if isinstance(delays, dict):
        return delays
    return as_delay_model(delays).resolve(circuit)


def _arc_delay(rf: Tuple[int, int], transition: str) -> int:
    if transition == "rise":
        return rf[0]
    if transition == "fall":
        return rf[1]
    if transition == "max":
        return max(rf)
    raise ValueError(f"transition must be rise, fall or max, not {transition!r}")


def _cone_order(circuit: Circuit, source: str):
    """Arcs reachable from ``source`` and a topological order of their nets."""
    succ: Dict[str, List[Tuple[str, str]]] = {}
    for src, dst, g in combinational_arcs(circuit):
        succ.setdefault(src, []).append((dst, g.output))
    reach = {source}
    stack = [source]
    while stack:
        n = stack.pop()
        for dst, _ in succ.get(n, ()):
            if dst not in reach:
                reach.add(dst)
                stack.append(dst)
    preds: Dict[str, set] = {n: set() for n in reach}
    for s in reach:
        for dst, _ in succ.get(s, ()):
            preds[dst].add(s)
    try:
        order = list(graphlib.TopologicalSorter(preds).static_order())
    except graphlib.CycleError as exc:
        raise StructuralError(f"cone of {source!r} is cyclic: {exc.args[1]}") from None
    return succ, order


def _path_extreme(circuit, source, sink, delays, transition, pick):
    if not circuit.has_net(source) or not circuit.has_net(sink):
        raise StructuralError(f"unknown net in path query {source!r} -> {sink!r}")
    if source == sink:
        return 0
    per_gate = _gate_delays(circuit, delays)
    succ, order = _cone_order(circuit, source)
    best: Dict[str, int] = {source: 0}
    for n in order:
        if n not in best:
            continue
        for dst, gate_id in succ.get(n, ()):
            cand = best[n] + _arc_delay(per_gate[gate_id], transition)
            if dst not in best or pick(cand, best[dst]) == cand:
                best[dst] = cand
    return best.get(sink)


def static_path_delay(circuit: Circuit, source: str, sink: str, delays=None,
                      transition: str = "max") -> Optional[int]:
    """Longest path delay (ps) from ``source`` to ``sink``; ``None`` if unconnected.

    ``delays`` is a DelayTable, a delay model or resolved per-gate delays.
    C-element feedback arcs of AO222 realizations are broken; a behavioral
    C2 counts once from either input.  ``transition`` picks rise, fall or
    the larger of the two for every arc.
    """
    return _path_extreme(circuit, source, sink, delays, transition, max)


def shortest_path_delay(circuit: Circuit, source: str, sink: str, delays=None,
                        transition: str = "max") -> Optional[int]:
    return _path_extreme(circuit, source, sink, delays, transition, min)


def fig2_paths(delays=None) -> Tuple[int, int]:
    """(direct, indirect) sum-reset path delays of a two-stage adder, in ps.

    Direct: operand code of the upper stage to its sum rail.  Indirect: the
    operand code of the lower stage to the upper sum rail through the carry.
    """
    circuit, desc = build_rca(2, include_encoders=False)
    lo, hi = desc.stages
    direct = static_path_delay(circuit, hi.e1, hi.sum1, delays, "fall")
    indirect = static_path_delay(circuit, lo.e1, hi.sum1, delays, "fall")
    return direct, indirect


def base_table(delay_model) -> Optional[DelayTable]:
    """The per-kind table behind a delay model, if there is a single one."""
    if delay_model is None:
        return DelayTable.default()
    if isinstance(delay_model, DelayTable):
        return delay_model
    if isinstance(delay_model, FixedDelays):
        return delay_model.table
    if isinstance(delay_model, OverrideDelays):
        return base_table(delay_model.base)
    return None


def compute_rt_slack(delays=None) -> int:
    """Direct minus indirect sum-reset path delay (ps); negative means the
    carry-borne reset trails the direct one by that much."""
    direct, indirect = fig2_paths(delays)
    return direct - indirect


# -- RTZ fall-time bounds --------------------------------------------------------

def rtz_fall_bounds(circuit: Circuit, delays=None) -> Tuple[Dict[str, int], Dict[str, int]]:
    """Earliest / latest possible fall instants of every net in an RTZ phase.

    Assumes all primary inputs return to spacer at t=0 and every net that is
    high falls.  The latest bound uses the exact rule for positive gates
    (output falls once every product term has a low literal); the earliest
    bound takes the first input that could release the gate.
    """
    per_gate = _gate_delays(circuit, delays)
    drivers = circuit.drivers
    graph = {g.output: {i for i in g.inputs if i != g.output} for g in circuit.gates}
    order = graphlib.TopologicalSorter(graph).static_order()
    lb: Dict[str, int] = {}
    ub: Dict[str, int] = {}
    for n in order:
        g = drivers.get(n)
        if g is None:
            lb[n] = ub[n] = 0
            continue
        d = per_gate[n][1]
        ins = g.inputs
        if g.kind is GateKind.C2 or g.is_c_element_feedback:
            a, b = ins[0], ins[1]
            lb[n] = max(lb[a], lb[b]) + d
            ub[n] = max(ub[a], ub[b]) + d
            continue
        if g.kind is GateKind.OR2:
            terms = ((ins[0],), (ins[1],))
        else:
            terms = tuple(ins[i:i + 2] for i in range(0, len(ins) - 1, 2))
            if g.kind is GateKind.AO21:
                terms = ((ins[0], ins[1]), (ins[2],))
        ub[n] = max(min(ub[x] for x in t) for t in terms) + d
        lb[n] = min(lb[x] for x in ins) + d
    return lb, ub


def rt_constraint_holds(circuit: Circuit, desc: RcaDescriptor, delays=None) -> bool:
    """Sufficient check that every internal carry falls strictly before the
    next stage's sum rails can fall, for any data and simultaneous RTZ."""
    lb, ub = rtz_fall_bounds(circuit, delays)
    for prev, stage in zip(desc.stages, desc.stages[1:]):
        carry_latest = max(ub[prev.cout1], ub[prev.cout0])
        sum_earliest = min(lb[stage.sum1], lb[stage.sum0])
        if carry_latest >= sum_earliest:
            return False
    return True


# -- steady-state helpers --------------------------------------------------------

def _settle_time(circuit: Circuit, per_gate: GateDelays) -> int:
    return 1 + sum(max(v) for v in per_gate.values())


def _rails_schedule(circuit: Circuit, values: Mapping[str, Any], t: int):
    sched = []
    for g in circuit.input_groups:
        if g.name in values:
            for net, lvl in zip(g.nets, group_rails(g, values[g.name])):
                if lvl:
                    sched.append((t, net, 1))
    return sched


def _group_classes(circuit: Circuit, levels: Mapping[str, int]) -> Dict[str, CodeClass]:
    out = {}
    for g in circuit.output_groups:
        high = sum(levels[n] for n in g.nets)
        out[g.name] = (CodeClass.SPACER if high == 0 else
                       CodeClass.VALID if high == 1 else CodeClass.INVALID)
    return out


def _group_values(group: PortGroup) -> List[Any]:
    if group.encoding == "dualrail":
        return [0, 1]
    if group.encoding == "oneof4":
        return [(x, y) for x in (0, 1) for y in (0, 1)]
    return [1]


def settle(circuit: Circuit, values: Mapping[str, Any], delay_model=None,
           rtz: Iterable[str] = ()) -> Dict[str, int]:
    """Final net levels after applying ``values`` from reset, then optionally
    returning the groups in ``rtz`` to spacer."""
    per_gate = as_delay_model(delay_model).resolve(circuit)
    t_settle = _settle_time(circuit, per_gate)
    sched = _rails_schedule(circuit, values, 0)
    rtz = set(rtz)
    sched += [(t_settle, n, 0) for t, n, v in sched
              if any(n in circuit.group(g).nets for g in rtz)]
    trace = simulate(circuit, sched, FixedPerGate(per_gate))
    return trace.final_levels()


@dataclass(frozen=True)
class FixedPerGate:
    """A delay model that returns already resolved per-gate delays."""

    delays: GateDelays

    def resolve(self, circuit: Circuit) -> GateDelays:
        return dict(self.delays)

    def describe(self) -> str:
        return "per-gate"


# -- monotonic cover -------------------------------------------------------------

@dataclass
class CoverRow:
    e: Optional[Tuple[int, int]]
    cin: Optional[int]
    output: str
    level: int
    active_terms: List[str]
    ok: bool


@dataclass
class MonotonicCoverReport(_Report):
    rows: List[CoverRow] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.rows)

    def to_text(self) -> str:
        lines = [f"monotonic cover: {'PASS' if self.passed else 'FAIL'}"]
        for r in self.rows:
            lines.append(f"  E={r.e} CIN={r.cin} {r.output}={r.level} "
                         f"terms={','.join(r.active_terms) or '-'} {'ok' if r.ok else 'FAIL'}")
        return "\n".join(lines)


def check_monotonic_cover(circuit: Circuit, ports: Optional[FullAdderPorts] = None,
                          delay_model=None) -> MonotonicCoverReport:
    """Count satisfied product terms of each output equation on every valid input.

    The circuit is settled on each of the 8 valid (operand code, carry)
    combinations and on all-spacer.  A row passes when a high output has
    exactly one satisfied term and a low output has none, so terms of one
    equation are never simultaneously true.
    """
    ports = ports or FullAdderPorts.for_stage(0, "CIN1_0", "CIN0_0")
    encoded = any(g.name == f"A_{ports.stage}" for g in circuit.input_groups)
    report = MonotonicCoverReport()
    cases: List[Tuple[Optional[Tuple[int, int]], Optional[int]]] = [(None, None)]
    cases += [((x, y), c) for x in (0, 1) for y in (0, 1) for c in (0, 1)]
    for e, cin in cases:
        values: Dict[str, Any] = {}
        if e is not None:
            if encoded:
                values[f"A_{ports.stage}"], values[f"B_{ports.stage}"] = e
            else:
                values[f"E_{ports.stage}"] = e
            values["CIN"] = cin
        levels = settle(circuit, values, delay_model)
        for out, terms in FA_EQUATIONS.items():
            active = ["".join(t) for t in terms
                      if all(levels[ports.literal(lit)] for lit in t)]
            level = levels[ports.literal(out)]
            ok = len(active) == (1 if level else 0)
            report.rows.append(CoverRow(e, cin, out, level, active, ok))
    return report


# -- indication ------------------------------------------------------------------

@dataclass
class IndicationProfile(_Report):
    set_class: Dict[str, str]  # output -> "strong" | "early-set"
    reset_class: Dict[str, str]  # output -> "standard-reset" | "early-reset"
    requires: Dict[str, List[str]]  # output -> input groups that must be valid
    early_set_witness: Dict[str, Optional[List[str]]]
    early_reset_witness: Dict[str, Optional[List[str]]]
    circuit_set: str  # "strong" | "weak" | "early-set"
    circuit_reset: str  # "standard-reset" | "early-reset"

    def to_text(self) -> str:
        lines = [f"indication: {self.circuit_set}, {self.circuit_reset}"]
        for o in self.set_class:
            lines.append(f"  {o}: {self.set_class[o]}, {self.reset_class[o]}, "
                         f"needs {'+'.join(self.requires[o]) or 'nothing'}")
        return "\n".join(lines)


def _proper_subsets(names: Sequence[str]):
    for r in range(1, len(names)):
        yield from itertools.combinations(names, r)


def classify_indication(circuit: Circuit, groups: Optional[Sequence[str]] = None,
                        delay_model=None) -> IndicationProfile:
    """Probe which outputs can be set or reset from a subset of the inputs.

    Set probes apply valid data on a proper subset of the input groups (all
    value combinations) from reset.  Reset probes settle a full valid input,
    then return only a subset to spacer; an output counts as early-reset
    when some subset resets it for every valid input.  Bare groups count as
    valid when high.
    """
    in_groups = [circuit.group(g) for g in groups] if groups else circuit.input_groups
    names = [g.name for g in in_groups]
    outputs = [g.name for g in circuit.output_groups]
    domains = {g.name: _group_values(g) for g in in_groups}

    def assignments(subset):
        for combo in itertools.product(*(domains[n] for n in subset)):
            yield dict(zip(subset, combo))

    set_witness: Dict[str, Optional[List[str]]] = {o: None for o in outputs}
    reached: Dict[str, set] = {o: set() for o in outputs}  # subsets making o valid
    circuit_early_set = False
    for subset in _proper_subsets(names):
        for values in assignments(subset):
            classes = _group_classes(circuit, settle(circuit, values, delay_model))
            valid = [o for o in outputs if classes[o] is CodeClass.VALID]
            for o in valid:
                reached[o].add(subset)
                if set_witness[o] is None:
                    set_witness[o] = list(subset)
            if len(valid) == len(outputs):
                circuit_early_set = True
    full = list(assignments(names))
    for values in full:
        classes = _group_classes(circuit, settle(circuit, values, delay_model))
        for o in outputs:
            if classes[o] is CodeClass.VALID:
                reached[o].add(tuple(names))

    requires = {}
    for o in outputs:
        requires[o] = [n for n in names if all(n in s for s in reached[o])]

    reset_witness: Dict[str, Optional[List[str]]] = {o: None for o in outputs}
    circuit_early_reset = False
    for subset in _proper_subsets(names):
        resets_all = {o: True for o in outputs}
        for values in full:
            classes = _group_classes(circuit, settle(circuit, values, delay_model, rtz=subset))
            for o in outputs:
                if classes[o] is not CodeClass.SPACER:
                    resets_all[o] = False
        for o in outputs:
            if resets_all[o] and reset_witness[o] is None:
                reset_witness[o] = list(subset)
        if all(resets_all.values()):
            circuit_early_reset = True

    set_class = {o: "early-set" if set_witness[o] else "strong" for o in outputs}
    if circuit_early_set:
        circuit_set = "early-set"
    elif any(v == "early-set" for v in set_class.values()):
        circuit_set = "weak"
    else:
        circuit_set = "strong"
    return IndicationProfile(
        set_class=set_class,
        reset_class={o: "early-reset" if reset_witness[o] else "standard-reset"
                     for o in outputs},
        requires=requires,
        early_set_witness=set_witness,
        early_reset_witness=reset_witness,
        circuit_set=circuit_set,
        circuit_reset="early-reset" if circuit_early_reset else "standard-reset",
    )


# -- orphans ---------------------------------------------------------------------

@dataclass
class Orphan:
    net: str
    time: int
    phase: int
    kind: str  # "wire-orphan" | "gate-orphan"
    explanation: str


@dataclass
class OrphanReport(_Report):
    orphans: List[Orphan] = field(default_factory=list)

    def __bool__(self):
        return bool(self.orphans)

    def __len__(self):
        return len(self.orphans)

    def nets(self) -> List[str]:
        return sorted({o.net for o in self.orphans})

    def to_text(self) -> str:
        if not self.orphans:
            return "orphans: none"
        lines = [f"orphans: {len(self.orphans)}"]
        for o in self.orphans:
            lines.append(f"  {o.kind} {o.net} ({gate_label(o.net)}) at "
                         f"{ps_to_ns(o.time):.3f} ns, phase {o.phase}: {o.explanation}")
        return "\n".join(lines)


def detect_orphans(trace: Trace, circuit: Circuit) -> OrphanReport:
    """Transitions the environment never waited for.

    A transition is unacknowledged when it occurs, or is still pending, after
    the completion instant of its phase (the moment every output group
    finished that phase's transition), or when its polarity belongs to an
    earlier phase.  Gate outputs give gate orphans; primary inputs give
    wire orphans.  An input completion detector modelled as an output group
    (``done_in``) moves the completion instant past late input transitions.
    """
    if not trace.phases:
        raise ValueError("detect_orphans needs a handshake trace with phase markers")
    if not trace.recorded:
        raise ValueError("detect_orphans needs a trace recorded with record=True")
    phases = trace.phases
    firsts = [p.first_event for p in phases]
    driven = {g.output for g in circuit.gates}
    report = OrphanReport()

    def phase_of(event_index):
        i = bisect.bisect_right(firsts, event_index) - 1
        return phases[i] if i >= 0 else None

    raw, nets = trace.raw_events, trace.nets
    bounds = firsts[1:] + [len(raw)]
    for p, stop in zip(phases, bounds):
        want = 1 if p.rising else 0
        late = p.complete
        for idx in range(p.first_event, stop):
            t, n, v, _ = raw[idx]
            if v == want and (late is None or t <= late):
                continue
            net = nets[n]
            kind = "gate-orphan" if net in driven else "wire-orphan"
            edge = "rise" if v else "fall"
            if v != want:
                why = f"{edge} left over from an earlier phase, occurring in {p.kind} phase"
            else:
                why = f"{edge} {t - late} ps after phase completion"
            report.orphans.append(Orphan(net, t, p.index, kind, why))
    for c in trace.cancelled:
        # a scheduled transition belongs to the phase of the event that caused it
        p = phase_of(c.cause) if c.cause is not None else None
        if p is None or p.complete is None:
            continue
        if c.cancelled > p.complete:
            edge = "rise" if c.level else "fall"
            report.orphans.append(Orphan(
                c.net, c.scheduled, p.index, "gate-orphan",
                f"{edge} scheduled for {c.scheduled} ps still pending at completion "
                f"({p.complete} ps), withdrawn at {c.cancelled} ps"))
    report.orphans.sort(key=lambda o: (o.time, o.net))
    return report


# -- relative timing -------------------------------------------------------------

@dataclass
class StageTiming:
    cycle: int
    stage: int
    carry_net: Optional[str]
    sum_net: Optional[str]
    carry_fall: Optional[int]
    sum_fall: Optional[int]
    margin_ps: Optional[int]  # carry fall - sum fall; negative = ordering holds
    slack_ps: Optional[int]  # sum fall - carry-borne reset arrival at the sum
    exercised: bool
    ok: bool
    withdrawn: bool = False  # carry fall was scheduled but cancelled


@dataclass
class RtSlackReport(_Report):
    stages: List[StageTiming]
    static_slack_ps: Optional[int]  # None when delays are not from one table

    @property
    def passed(self) -> bool:
        return all(s.ok for s in self.stages)

    @property
    def violations(self) -> List[StageTiming]:
        return [s for s in self.stages if s.exercised and not s.ok]

    def to_text(self) -> str:
        static = ("n/a" if self.static_slack_ps is None
                  else f"{ps_to_ns(self.static_slack_ps):+.3f} ns")
        lines = [f"relative timing: {'PASS' if self.passed else 'FAIL'}  static slack {static}"]
        for s in self.stages:
            if not s.exercised:
                lines.append(f"  cycle {s.cycle} stage {s.stage}: not exercised")
                continue
            lines.append(
                f"  cycle {s.cycle} stage {s.stage}: {s.carry_net} falls "
                f"{ps_to_ns(s.carry_fall):.3f}, {s.sum_net} falls {ps_to_ns(s.sum_fall):.3f}, "
                f"margin {ps_to_ns(s.margin_ps):+.3f} ns, slack {ps_to_ns(s.slack_ps):+.3f} ns"
                f"{'' if s.ok else '  VIOLATION'}")
        return "\n".join(lines)


def check_relative_timing(trace: Trace, desc: RcaDescriptor, circuit: Circuit,
                          delay_model=None, cycles: Optional[Iterable[int]] = None
                          ) -> RtSlackReport:
    """Per RTZ phase and stage i >= 1: does the carry out of stage i-1 fall
    strictly before the sum of stage i?

    ``margin_ps`` is carry fall minus sum fall.  ``slack_ps`` is the sum fall
    minus the instant the carry fall would reach that sum rail through the
    next stage's AO22 and C-element, the run-time counterpart of
    :func:`compute_rt_slack`.  A carry fall that was scheduled and then
    cancelled counts at its scheduled instant.
    """
    if not trace.phases:
        raise ValueError("check_relative_timing needs a handshake trace")
    per_gate = as_delay_model(delay_model).resolve(circuit)
    table = base_table(delay_model)
    static = compute_rt_slack(table) if table is not None else None
    wanted = set(cycles) if cycles is not None else None
    phases = trace.phases
    falls: Dict[str, List[Tuple[int, bool]]] = {}
    for e in trace.events:
        if e.level == 0:
            falls.setdefault(e.net, []).append((e.time, False))
    for c in trace.cancelled:
        if c.level == 0:
            falls.setdefault(c.net, []).append((c.scheduled, True))
    for v in falls.values():
        v.sort()
    fall_times = {n: [t for t, _ in v] for n, v in falls.items()}

    def first_fall(nets, lo, hi):
        best = None
        for n in nets:
            times = fall_times.get(n)
            if not times:
                continue
            j = bisect.bisect_left(times, lo)
            if j < len(times) and times[j] < hi and (best is None or times[j] < best[0]):
                best = (times[j], n, falls[n][j][1])
        return best

    cone_cache: Dict[Tuple[str, str], int] = {}
    stages: List[StageTiming] = []
    for k, p in enumerate(phases):
        if p.kind != "rtz" or (wanted is not None and p.cycle not in wanted):
            continue
        # late carry falls may land after the next valid phase has started
        hi = next((q.start for q in phases[k + 1:] if q.kind == "rtz"), float("inf"))
        for prev, st in zip(desc.stages, desc.stages[1:]):
            carry = first_fall((prev.cout1, prev.cout0), p.start, hi)
            summ = first_fall((st.sum1, st.sum0), p.start, hi)
            if carry is None or summ is None:
                stages.append(StageTiming(p.cycle, st.stage, None, None, None, None,
                                          None, None, False, True))
                continue
            key = (carry[1], summ[1])
            if key not in cone_cache:
                cone_cache[key] = static_path_delay(circuit, carry[1], summ[1],
                                                    per_gate, "fall")
            margin = carry[0] - summ[0]
            slack = summ[0] - (carry[0] + cone_cache[key])
            stages.append(StageTiming(p.cycle, st.stage, carry[1], summ[1], carry[0],
                                      summ[0], margin, slack, True, margin < 0,
                                      carry[2]))
    return RtSlackReport(stages, static)


# -- latency ---------------------------------------------------------------------

@dataclass
class CycleLatency:
    cycle: int
    forward_ps: Optional[int]
    reverse_ps: Optional[int]
    cycle_time_ps: Optional[int]
    chain_length: Optional[int] = None


@dataclass
class LatencyMetrics(_Report):
    cycles: List[CycleLatency]
    forward_mean_ps: Optional[float]
    forward_max_ps: Optional[int]
    reverse_mean_ps: Optional[float]
    reverse_max_ps: Optional[int]
    cycle_time_mean_ps: Optional[float]
    by_chain_length: Dict[int, float] = field(default_factory=dict)

    def chain_fit(self) -> Tuple[float, float]:
        """Least-squares (slope, intercept) of forward latency vs chain length, ps."""
        pts = [(c.chain_length, c.forward_ps) for c in self.cycles
               if c.chain_length is not None and c.forward_ps is not None]
        if len({x for x, _ in pts}) < 2:
            raise ValueError("need at least two distinct chain lengths to fit")
        x, y = np.array(pts, dtype=float).T
        slope, intercept = np.polyfit(x, y, 1)
        return float(slope), float(intercept)

    def to_text(self) -> str:
        def ns(v):
            return "n/a" if v is None else f"{ps_to_ns(v):.3f} ns"
        lines = [
            f"forward latency: mean {ns(self.forward_mean_ps)}, max {ns(self.forward_max_ps)}",
            f"reverse latency: mean {ns(self.reverse_mean_ps)}, max {ns(self.reverse_max_ps)}",
            f"cycle time: mean {ns(self.cycle_time_mean_ps)}",
        ]
        for length in sorted(self.by_chain_length):
            lines.append(f"  chain length {length:3d}: forward {ns(self.by_chain_length[length])}")
        return "\n".join(lines)


def _mean(values):
    values = [v for v in values if v is not None]
    return float(np.mean(values)) if values else None


def _max(values):
    values = [v for v in values if v is not None]
    return max(values) if values else None


def measure_latency(trace_or_cycles, desc: Optional[RcaDescriptor] = None) -> LatencyMetrics:
    """Forward/reverse latency and cycle time from handshake cycle records.

    With an adder descriptor, each cycle is tagged with the carry chain
    length of its operands (longest run of propagate stages).
    """
    cycles: Sequence[Cycle] = (trace_or_cycles.cycles if isinstance(trace_or_cycles, Trace)
                               else trace_or_cycles)
    if isinstance(trace_or_cycles, Trace) and not trace_or_cycles.phases:
        raise ValueError("measure_latency needs a handshake trace with phase markers")
    rows = []
    prev_complete = None
    for c in cycles:
        cycle_time = None
        if prev_complete is not None and c.valid_complete is not None:
            cycle_time = c.valid_complete - prev_complete
        prev_complete = c.valid_complete
        chain = None
        if desc is not None:
            a, b = _operands(desc, c.vector)
            chain = carry_chain_length(desc.width, a, b)
        rows.append(CycleLatency(c.index, c.forward_latency, c.reverse_latency,
                                 cycle_time, chain))
    by_chain: Dict[int, List[int]] = {}
    for r in rows:
        if r.chain_length is not None and r.forward_ps is not None:
            by_chain.setdefault(r.chain_length, []).append(r.forward_ps)
    return LatencyMetrics(
        cycles=rows,
        forward_mean_ps=_mean(r.forward_ps for r in rows),
        forward_max_ps=_max(r.forward_ps for r in rows),
        reverse_mean_ps=_mean(r.reverse_ps for r in rows),
        reverse_max_ps=_max(r.reverse_ps for r in rows),
        cycle_time_mean_ps=_mean(r.cycle_time_ps for r in rows),
        by_chain_length={k: float(np.mean(v)) for k, v in sorted(by_chain.items())},
    )


def _operands(desc: RcaDescriptor, vector: Mapping[str, Any]) -> Tuple[int, int]:
    a = b = 0
    for i in range(desc.width):
        if desc.has_encoders:
            ai, bi = vector[f"A_{i}"], vector[f"B_{i}"]
        else:
            e = vector[f"E_{i}"]
            ai, bi = e if isinstance(e, (tuple, list)) else (e >> 1, e & 1)
        a |= ai << i
        b |= bi << i
    return a, b


# -- misc trace checks -----------------------------------------------------------

def check_phase_monotonicity(trace: Trace) -> List[int]:
    """Indices of events whose direction disagrees with their handshake phase
    (a fall during a valid phase or a rise during an RTZ phase)."""
    if not trace.phases:
        raise ValueError("phase monotonicity needs a handshake trace")
    raw = trace.raw_events
    bounds = [p.first_event for p in trace.phases[1:]] + [len(raw)]
    bad = []
    for p, stop in zip(trace.phases, bounds):
        want = 1 if p.rising else 0
        bad.extend(i for i in range(p.first_event, stop) if raw[i][2] != want)
    return sorted(bad)


def longest_io_delay(circuit: Circuit, delays=None, transition: str = "rise") -> int:
    """Longest static path from any primary input net to any output-group net."""
    outs = {n for g in circuit.output_groups for n in g.nets}
    best = 0
    for src in circuit.primary_inputs:
        for dst in outs:
            d = static_path_delay(circuit, src, dst, delays, transition)
            if d is not None:
                best = max(best, d)
    return best
