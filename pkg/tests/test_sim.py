import pytest
from hypothesis import given, settings, strategies as st

from asyncadder.adders import build_rca
from asyncadder.analysis import settle
from asyncadder.errors import (NetlistSyntaxError, OscillationError, ProtocolViolation,
                               SimulationError, StructuralError)
from asyncadder.netlist import Circuit, GateKind
from asyncadder.sim import (DelayTable, FixedDelays, OverrideDelays, RandomBoundedDelays,
                           Stimulus, ns_to_ps, parse_stimulus, ps_to_ns,
                           run_handshake_cycles, simulate)

from oracles import rtz_event_times


def chain():
    c = Circuit("chain")
    for n in ("a", "b", "x", "y"):
        c.add_net(n)
    c.add_gate("or2", ("a", "b"), "x")
    c.add_gate("c2", ("x", "b"), "y")
    return c


def test_unit_conversion():
    assert ns_to_ps(0.063) == 63
    assert ns_to_ps("0.301") == 301
    assert ps_to_ns(238) == pytest.approx(0.238)


def test_default_table_values():
    t = DelayTable.default()
    assert {k.value: t.rise[k] for k in GateKind} == {
        "or2": 70, "ao21": 63, "ao22": 90, "ao222": 90, "c2": 78}
    assert t.rise == t.fall
    assert t.digest() == DelayTable.from_text(t.to_text()).digest()


def test_delay_table_text_defaults_and_errors():
    t = DelayTable.from_text("# only one entry\nao21 0.050 0.300\n")
    assert t.rise[GateKind.AO21] == 50 and t.fall[GateKind.AO21] == 300
    assert t.rise[GateKind.OR2] == 70
    with pytest.raises(NetlistSyntaxError):
        DelayTable.from_text("ao21 0.05\n")
    with pytest.raises(NetlistSyntaxError):
        DelayTable.from_text("nand2 0.05 0.05\n")
    with pytest.raises(ValueError):
        DelayTable.from_ns({"or2": -1})


def test_single_transition_timing():
    tr = simulate(chain(), [(0, "a", 1), (0, "b", 1)])
    assert tr.transitions("x") == [(70, 1)]
    assert tr.transitions("y") == [(148, 1)]
    assert tr.quiescent and tr.end_time == 148


def test_inertial_cancel_on_short_pulse():
    # a 40 ps pulse is shorter than the 70 ps OR2 delay
    tr = simulate(chain(), [(0, "a", 1), (40, "a", 0)])
    assert tr.transitions("x") == []
    [c] = tr.cancelled
    assert (c.net, c.level, c.scheduled, c.cancelled) == ("x", 1, 70, 40)


def test_c2_holds_until_agreement():
    tr = simulate(chain(), [(0, "a", 1), (0, "b", 1), (500, "b", 0), (900, "a", 0)])
    assert tr.transitions("y") == [(148, 1), (1048, 0)]


def test_stimulus_validation():
    with pytest.raises(StructuralError):
        simulate(chain(), [(0, "x", 1)])
    with pytest.raises(StructuralError):
        simulate(chain(), [(0, "nope", 1)])
    with pytest.raises(ValueError):
        simulate(chain(), [(0, "a", 2)])


def test_horizon_stops_early():
    tr = simulate(chain(), [(0, "a", 1), (0, "b", 1)], horizon=100)
    assert not tr.quiescent
    assert tr.transitions("y") == []


def test_oscillation_bound():
    with pytest.raises(OscillationError):
        simulate(chain(), [(0, "a", 1)], oscillation_bound=0)


def test_record_false_keeps_results():
    c, d = build_rca(3)
    vecs = [d.vector(5, 3, 1), d.vector(7, 7, 0)]
    full, cy1 = run_handshake_cycles(c, vecs)
    lean, cy2 = run_handshake_cycles(c, vecs, record=False)
    assert [x.outputs for x in cy1] == [x.outputs for x in cy2]
    assert [x.forward_latency for x in cy1] == [x.forward_latency for x in cy2]
    assert lean.events == [] and full.events


def test_stimulus_text_round_trip():
    s = Stimulus().at(0, "a", 1).at(125, "b", 1)
    back = parse_stimulus(s.to_text())
    assert back.schedule == s.schedule
    v = parse_stimulus("vector 0x3 1 0\nvector 2 2 1\n")
    assert v.vectors == [(3, 1, 0), (2, 2, 1)]


@pytest.mark.parametrize("text", [
    "at x set a 1\n", "at 0 put a 1\n", "at 0 set a 2\n", "at -5 set a 1\n",
    "vector 1 2 3 4 5 six\n", "at 0 set a 1\nvector 1 1 0\n", "hello\n",
])
def test_stimulus_parse_errors(text):
    with pytest.raises(NetlistSyntaxError):
        parse_stimulus(text)


def test_model_resolution():
    c, _ = build_rca(2)
    t = DelayTable.default()
    fixed = FixedDelays(t).resolve(c)
    assert fixed["COUT0_0"] == (63, 63)
    over = OverrideDelays(t, {"COUT0_0": {"fall": 0.3}, "int1_0": 0.01}).resolve(c)
    assert over["COUT0_0"] == (63, 300) and over["int1_0"] == (10, 10)
    with pytest.raises(StructuralError):
        OverrideDelays(t, {"nope": 1.0}).resolve(c)
    r1 = RandomBoundedDelays(t.scaled(0.5), t.scaled(1.5), 3).resolve(c)
    r2 = RandomBoundedDelays(t.scaled(0.5), t.scaled(1.5), 3).resolve(c)
    assert r1 == r2
    for g in c.gates:
        base = t.rise[g.kind]
        assert all(round(base * 0.5) <= d <= round(base * 1.5) for d in r1[g.output])
    with pytest.raises(ValueError):
        RandomBoundedDelays(t.scaled(2), t, 0)


def _dual_rail_buffer(swap=False, stall=False):
    c = Circuit("buf")
    for n in ("x1", "x0", "y1", "y0"):
        c.add_net(n)
    c.add_group("X", "input", "dualrail", ["x1", "x0"])
    c.add_group("Y", "output", "dualrail", ["y1", "y0"])
    if stall:
        c.add_gate("c2", ("x1", "x0"), "y1")
        c.add_gate("c2", ("x0", "x1"), "y0")
    else:
        c.add_gate("or2", ("x1", "x0" if swap else "x1"), "y1")
        c.add_gate("or2", ("x0", "x0"), "y0")
    return c


def test_handshake_buffer():
    tr, cycles = run_handshake_cycles(_dual_rail_buffer(), [{"X": 1}, {"X": 0}], env_delay=5)
    assert [c.outputs["Y"] for c in cycles] == [1, 0]
    assert [c.forward_latency for c in cycles] == [70, 70]
    assert [c.reverse_latency for c in cycles] == [70, 70]
    assert [p.kind for p in tr.phases] == ["valid", "rtz", "valid", "rtz"]
    # cycle time = forward + reverse + two environment reactions
    assert cycles[1].valid_complete - cycles[0].valid_complete == 150


def test_handshake_invalid_code_is_a_protocol_violation():
    with pytest.raises(ProtocolViolation) as info:
        run_handshake_cycles(_dual_rail_buffer(swap=True), [{"X": 0}], env_delay=5)
    assert "INVALID" in str(info.value).upper()


def test_same_instant_spacer_withdraws_pending_glitch():
    # with a zero-delay environment the spacer lands before the second rail rises
    tr, _ = run_handshake_cycles(_dual_rail_buffer(swap=True), [{"X": 0}])
    assert [(c.net, c.scheduled, c.cancelled) for c in tr.cancelled] == [("y0", 70, 70)]


def test_handshake_stall_is_a_protocol_violation():
    with pytest.raises(ProtocolViolation, match="stall"):
        run_handshake_cycles(_dual_rail_buffer(stall=True), [{"X": 1}])


def _run(n, vectors, model=None):
    c, d = build_rca(n)
    return run_handshake_cycles(c, [d.vector(*v) for v in vectors], model)


def test_determinism():
    vecs = [(9, 6, 1), (15, 1, 0), (0, 0, 0)]
    t1, _ = _run(4, vecs)
    t2, _ = _run(4, vecs)
    assert t1.raw_events == t2.raw_events
    assert t1.raw_cancelled == t2.raw_cancelled


def test_delay_scaling_scales_every_timestamp():
    vecs = [(9, 6, 1), (15, 1, 0)]
    t1, c1 = _run(4, vecs)
    t2, c2 = _run(4, vecs, DelayTable.default().scaled(3))
    assert [(e.net, e.level) for e in t1.events] == [(e.net, e.level) for e in t2.events]
    assert [3 * e.time for e in t1.events] == [e.time for e in t2.events]
    assert [3 * c.forward_latency for c in c1] == [c.forward_latency for c in c2]


def test_causality():
    tr, _ = _run(3, [(5, 2, 1), (7, 7, 1)])
    delays = FixedDelays(DelayTable.default()).resolve(build_rca(3)[0])
    for e in tr.events:
        if e.cause is None:
            continue
        cause = tr.events[e.cause]
        rise, fall = delays[e.net]
        assert e.time == cause.time + (rise if e.level else fall)


def test_zero_delay_still_completes():
    tr, cycles = _run(2, [(3, 1, 1)], DelayTable.zero())
    assert cycles[0].forward_latency == 0
    assert cycles[0].outputs["COUT"] == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 15), st.integers(0, 15), st.integers(0, 1))
def test_rtz_fall_times_match_independent_oracle(a, b, cin):
    c, d = build_rca(4)
    levels = settle(c, d.vector(a, b, cin))
    delays = FixedDelays(DelayTable.default()).resolve(c)
    expected = rtz_event_times(c, levels, delays)
    tr, cycles = run_handshake_cycles(c, [d.vector(a, b, cin)])
    start = tr.phases[1].start
    first = tr.phases[1].first_event
    measured = {e.net: e.time - start for e in tr.events[first:] if e.level == 0}
    assert measured == {n: t for n, t in expected.items() if t is not None}
    assert cycles[0].spacer_complete - start == max(
        expected[n] or 0 for g in c.output_groups for n in g.nets)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_delays_keep_arithmetic(seed):
    c, d = build_rca(3)
    t = DelayTable.default()
    model = RandomBoundedDelays(t.scaled(0.2), t.scaled(3.0), seed)
    vecs = [(a, b, ci) for a, b, ci in [(7, 1, 0), (5, 5, 1), (0, 0, 0), (6, 3, 1)]]
    _, cycles = run_handshake_cycles(c, [d.vector(*v) for v in vecs], model)
    assert [d.decode(x.outputs) for x in cycles] == [sum(v) for v in vecs]
