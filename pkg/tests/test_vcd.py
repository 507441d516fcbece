import re

import pytest

from asyncadder.adders import build_rca
from asyncadder.sim import run_handshake_cycles
from asyncadder.vcd import _identifier, export_vcd


def parse_vcd(text):
    """Minimal reader: id -> net map and a list of (time, net, level)."""
    names, changes, t = {}, [], None
    body = text.split("$enddefinitions $end", 1)
    for m in re.finditer(r"\$var wire 1 (\S+) (\S+) \$end", body[0]):
        names[m.group(1)] = m.group(2)
    for line in body[1].splitlines():
        if line.startswith("#"):
            t = int(line[1:])
        elif line and line[0] in "01" and t is not None:
            changes.append((t, names[line[1:]], int(line[0])))
    return names, changes


@pytest.fixture(scope="module")
def reset_run():
    # operand codes return first while the carry-in is held
    c, d = build_rca(2, include_encoders=False, input_detector=True)
    tr, cycles = run_handshake_cycles(c, [d.vector(3, 0, 1)], rtz_skew={"CIN": 500})
    return c, tr, cycles


def test_header(reset_run):
    c, tr, _ = reset_run
    text = export_vcd(tr, c, comment="unit").decode()
    assert "$timescale 1ps $end" in text
    assert "$comment unit $end" in text
    assert f"$scope module {c.name} $end" in text
    assert text.count("$var wire 1 ") == len(c.nets)
    assert text.count("$var wire 1 ") == len(tr.nets)


def test_changes_round_trip(reset_run):
    c, tr, _ = reset_run
    names, changes = parse_vcd(export_vcd(tr, c).decode())
    assert sorted(names.values()) == sorted(c.nets)
    dumped = [x for x in changes if x[0] > 0 or x[2] == 1]
    assert dumped == [(e.time, e.net, e.level) for e in tr.events]


def test_direct_reset_path_timestamp(reset_run):
    c, tr, cycles = reset_run
    _, changes = parse_vcd(export_vcd(tr, c).decode())
    start = cycles[0].spacer_applied
    falls = {net: t - start for t, net, v in changes if v == 0 and t >= start}
    # 3 + 0 + 1 = 4: stage 1 holds sum 0 and resets along the direct cone
    assert falls["SUM0_1"] == 238
    assert "SUM1_1" not in falls


def test_identifiers_unique_and_printable():
    ids = [_identifier(i) for i in range(20000)]
    assert len(set(ids)) == len(ids)
    assert all(33 <= ord(ch) <= 126 for s in ids for ch in s)


def test_unrecorded_trace_rejected():
    c, d = build_rca(1)
    tr, _ = run_handshake_cycles(c, [d.vector(1, 1, 0)], record=False)
    with pytest.raises(ValueError):
        export_vcd(tr, c)
