import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from asyncadder.adders import build_full_adder, build_rca, carry_chain_length
from asyncadder.analysis import (check_monotonic_cover, check_phase_monotonicity,
                                 check_relative_timing, classify_indication,
                                 compute_rt_slack, detect_orphans, fig2_paths,
                                 longest_io_delay, measure_latency, rt_constraint_holds,
                                 rtz_fall_bounds, settle, shortest_path_delay,
                                 static_path_delay)
from asyncadder.netlist import Circuit, GateKind
from asyncadder.sim import (DelayTable, FixedDelays, OverrideDelays, RandomBoundedDelays,
                            run_handshake_cycles)

from oracles import rtz_event_times

LATE_CIN = {"CIN": 500}


def carry_override(stage, fall_ns=0.30):
    return OverrideDelays(DelayTable.default(), {
        f"COUT0_{stage}": {"fall": fall_ns}, f"COUT1_{stage}": {"fall": fall_ns}})


# -- static paths ----------------------------------------------------------------

def test_reset_paths_default_table():
    assert fig2_paths() == (238, 301)
    assert compute_rt_slack() == -63


def test_reset_paths_follow_the_table():
    t = DelayTable.default()
    assert compute_rt_slack(t.scaled(2)) == -126
    slow_carry = t.with_delay("ao21", fall_ns=0.200)
    assert fig2_paths(slow_carry) == (238, 438)
    assert compute_rt_slack(slow_carry) == -200


def test_static_path_queries():
    c, _ = build_rca(2, include_encoders=False)
    assert static_path_delay(c, "E1_1", "SUM1_1", transition="fall") == 238
    assert static_path_delay(c, "SUM1_1", "E1_0") is None
    # via int3 (two OR2) rather than the AO22
    assert shortest_path_delay(c, "E1_1", "SUM1_1") == 70 + 70 + 78
    # the carry-borne path into the next stage's sum: AO21, AO22, C2
    assert static_path_delay(c, "COUT1_0", "SUM1_1") == 63 + 90 + 78 - 63


@pytest.mark.parametrize("n,expected", [(1, 316), (4, 505), (32, 2269)])
def test_longest_input_to_output(n, expected):
    c, _ = build_rca(n)
    assert longest_io_delay(c) == expected


def test_fall_bounds_bracket_every_simulated_rtz():
    c, d = build_rca(4)
    delays = FixedDelays(DelayTable.default()).resolve(c)
    lb, ub = rtz_fall_bounds(c)
    for a, b, ci in [(15, 0, 1), (5, 10, 0), (9, 9, 1), (0, 0, 0)]:
        times = rtz_event_times(c, settle(c, d.vector(a, b, ci)), delays)
        for net, t in times.items():
            if t is not None:
                assert lb[net] <= t <= ub[net], net


def test_rt_constraint_default_and_broken():
    c, d = build_rca(4)
    assert rt_constraint_holds(c, d)
    assert not rt_constraint_holds(c, d, carry_override(1))


# -- monotonic cover and indication ----------------------------------------------------

@pytest.mark.parametrize("encoder", [False, True])
def test_monotonic_cover(encoder):
    r = check_monotonic_cover(build_full_adder(include_encoder=encoder))
    assert r.passed
    assert len(r.rows) == 36
    highs = [row for row in r.rows if row.level]
    assert len(highs) == 16 and all(len(row.active_terms) == 1 for row in highs)


def test_monotonic_cover_catches_a_miswired_gate():
    good = build_full_adder()
    bad = Circuit(good.name, list(good.nets), [], list(good.groups))
    for g in good.gates:
        ins = g.inputs
        if g.output == "COUT1_0":
            ins = (ins[0], ins[1], "E0_0")
        bad.add_gate(g.kind, ins, g.output)
    r = check_monotonic_cover(bad)
    assert not r.passed
    assert "FAIL" in r.to_text()


def test_indication_profile_full_adder():
    p = classify_indication(build_full_adder())
    assert p.set_class == {"SUM_0": "strong", "COUT": "early-set"}
    assert p.reset_class == {"SUM_0": "early-reset", "COUT": "early-reset"}
    assert p.requires["SUM_0"] == ["E_0", "CIN"]
    assert p.early_reset_witness["SUM_0"] == ["E_0"]
    assert (p.circuit_set, p.circuit_reset) == ("weak", "early-reset")


def test_indication_profile_with_encoder():
    p = classify_indication(build_full_adder(include_encoder=True))
    assert p.requires["SUM_0"] == ["A_0", "B_0", "CIN"]
    assert p.early_set_witness["COUT"] == ["A_0", "B_0"]
    assert (p.circuit_set, p.circuit_reset) == ("weak", "early-reset")


@pytest.mark.parametrize("x,y,ci", list(itertools.product((0, 1), repeat=3)))
def test_operand_rtz_alone_resets_the_full_adder(x, y, ci):
    c = build_full_adder()
    levels = settle(c, {"E_0": (x, y), "CIN": ci}, rtz=["E_0"])
    assert levels["CIN1_0"] + levels["CIN0_0"] == 1  # carry-in still valid
    assert all(levels[n] == 0 for g in c.output_groups for n in g.nets)


# -- orphans and relative timing -------------------------------------------------------

def _propagate_run(**kw):
    c, d = build_rca(4, input_detector=kw.pop("input_detector", False))
    vecs = [(15, 0, 0), (15, 0, 1), (0, 15, 1), (5, 10, 0)]
    model = kw.pop("model", None)
    tr, cycles = run_handshake_cycles(c, [d.vector(*v) for v in vecs], model, **kw)
    return c, d, tr, cycles, model


def test_late_carry_in_with_input_detector_is_clean():
    c, d, tr, cycles, model = _propagate_run(rtz_skew=LATE_CIN, input_detector=True)
    assert [d.decode(x.outputs) for x in cycles] == [15, 16, 16, 15]
    assert not detect_orphans(tr, c)
    rt = check_relative_timing(tr, d, c)
    checked = [s for s in rt.stages if s.exercised]
    assert len(checked) == 12
    assert {s.slack_ps for s in checked} == {-63}
    assert {s.margin_ps for s in checked} == {-105}
    assert rt.passed and rt.static_slack_ps == -63


def test_late_carry_in_without_detector_is_a_wire_orphan():
    c, d, tr, cycles, _ = _propagate_run(rtz_skew=LATE_CIN)
    report = detect_orphans(tr, c)
    assert set(report.nets()) <= {"CIN1_0", "CIN0_0"} and report
    assert {o.kind for o in report.orphans} == {"wire-orphan"}
    assert [d.decode(x.outputs) for x in cycles] == [15, 16, 16, 15]


def test_slow_carry_fall_breaks_relative_timing():
    model = carry_override(1)
    c, d, tr, cycles, _ = _propagate_run(model=model)
    rt = check_relative_timing(tr, d, c, model)
    assert not rt.passed
    assert {s.stage for s in rt.violations} == {2}
    assert {s.carry_net for s in rt.violations} <= {"COUT0_1", "COUT1_1"}
    orphans = detect_orphans(tr, c)
    gate = {o.net for o in orphans.orphans if o.kind == "gate-orphan"}
    assert gate == {"COUT0_1", "COUT1_1"}
    assert check_phase_monotonicity(tr)  # the stale fall lands in a valid phase


def test_orphan_detector_needs_handshake_trace():
    c, d = build_rca(1)
    tr, _ = run_handshake_cycles(c, [d.vector(1, 0, 0)], record=False)
    with pytest.raises(ValueError):
        detect_orphans(tr, c)


# -- latency ----------------------------------------------------------------------

def test_latency_ladder():
    c, d = build_rca(4)
    vecs = [((1 << k) - 1, 0, 0) for k in range(4)]
    _, cycles = run_handshake_cycles(c, [d.vector(*v) for v in vecs])
    m = measure_latency(cycles, d)
    assert m.by_chain_length == {0: 316.0, 1: 379.0, 2: 442.0, 3: 505.0}
    slope, intercept = m.chain_fit()
    assert slope == pytest.approx(63) and intercept == pytest.approx(316)
    # zero environment delay: one cycle is the previous RTZ plus this evaluation
    for prev, row in zip(m.cycles, m.cycles[1:]):
        assert row.cycle_time_ps == prev.reverse_ps + row.forward_ps


@pytest.mark.parametrize("vec", [(0, 0, 0), "propagate", "generate"])
def test_reverse_latency_independent_of_width(vec):
    seen = set()
    for n in (4, 8, 16, 32):
        top = (1 << n) - 1
        v = {"propagate": (top, 0, 1), "generate": (top, top, 1)}.get(vec, vec)
        c, d = build_rca(n)
        _, cycles = run_handshake_cycles(c, [d.vector(*v)], record=False)
        seen.add(cycles[0].reverse_latency)
    assert len(seen) == 1


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 16 - 1), st.integers(0, 2 ** 16 - 1))
def test_forward_latency_grows_with_chain(a, b):
    c, d = build_rca(16)
    _, cycles = run_handshake_cycles(c, [d.vector(a, b, 0), d.vector(a, b, 1)], record=False)
    fwd = min(x.forward_latency for x in cycles)
    # a carry can only ripple through a propagate run, never further
    assert fwd <= 316 + 63 * carry_chain_length(16, a, b)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_constrained_random_delays_are_orphan_free(seed):
    c, d = build_rca(3)
    t = DelayTable.default()
    model = RandomBoundedDelays(t.scaled(0.5), t.scaled(1.5), seed)
    if not rt_constraint_holds(c, d, model):
        return
    vecs = list(itertools.product(range(8), range(8), (0, 1)))[::5]
    tr, cycles = run_handshake_cycles(c, [d.vector(*v) for v in vecs], model)
    assert [d.decode(x.outputs) for x in cycles] == [sum(v) for v in vecs]
    assert not detect_orphans(tr, c)
    assert check_relative_timing(tr, d, c, model).passed


def test_reports_serialize():
    c, d, tr, cycles, _ = _propagate_run()
    for report in (check_relative_timing(tr, d, c), detect_orphans(tr, c),
                   measure_latency(cycles, d), check_monotonic_cover(build_full_adder())):
        assert isinstance(report.to_json(), str)
        assert report.to_text()
