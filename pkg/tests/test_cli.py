import json

import pytest

from asyncadder.adders import build_rca
from asyncadder.cli import UsageError, main, parse_override
from asyncadder.netlist import parse_netlist

from oracles import isomorphic


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_generate_two_bit_is_the_programmatic_adder(tmp_path, capsys):
    path = tmp_path / "rca2.net"
    code, out, _ = run(capsys, "generate", "-n", "2", "-o", str(path))
    assert code == 0
    assert "26 gates" in out
    c, _ = build_rca(2)
    assert isomorphic(parse_netlist(path.read_text()), c)


def test_generate_to_stdout(capsys):
    code, out, err = run(capsys, "generate", "-n", "1", "--no-encoders", "--structural-c")
    assert code == 0
    assert out.startswith("# asyncadder netlist v1")
    assert "gate ao222" in out and "gate c2" not in out
    assert "9 gates" in err


def test_verify_pass(capsys):
    code, out, _ = run(capsys, "verify", "-n", "3", "--exhaustive")
    assert code == 0
    assert "verify 3-bit: PASS (128 vectors)" in out
    assert out.startswith("# asyncadder") and "delay_table=" in out


def test_verify_slow_carry_fails_with_counterexample(capsys):
    code, out, _ = run(capsys, "verify", "-n", "4", "--random", "50", "--seed", "1",
                       "--delay-override", "ao21_fall_stage1=0.30")
    assert code == 1
    assert "FAIL" in out and "first counterexample" in out
    assert "COUT" in out


def test_verify_json(capsys):
    code, out, err = run(capsys, "verify", "-n", "2", "--json", "--fast")
    assert code == 0
    data = json.loads(out)
    assert data["passed"] and data["vectors"] == 32
    assert err.startswith("# asyncadder")


def test_verify_exhaustive_cap(capsys):
    code, _, err = run(capsys, "verify", "-n", "9")
    assert code == 2 and "capped" in err


def test_bad_override_is_usage_error(capsys):
    code, _, err = run(capsys, "verify", "-n", "2", "--delay-override", "ao21_fall_stage1")
    assert code == 2
    code, _, err = run(capsys, "verify", "-n", "2", "--delay-override", "ghost:fall=0.1")
    assert code == 2 and "unknown gate" in err


def test_parse_override_forms():
    c, _ = build_rca(3)
    assert parse_override("ao21_fall_stage1=0.3", c) == {
        "COUT1_1": {"fall": 0.3}, "COUT0_1": {"fall": 0.3}}
    assert parse_override("SUM1_2=0.1", c) == {"SUM1_2": {"rise": 0.1, "fall": 0.1}}
    with pytest.raises(UsageError):
        parse_override("or2_both_stage7=0.1", c)
    with pytest.raises(UsageError):
        parse_override("SUM1_2:up=0.1", c)


def test_analyze(capsys):
    code, out, _ = run(capsys, "analyze", "-n", "4")
    assert code == 0
    assert "direct sum-reset path:   0.238 ns" in out
    assert "indirect (via carry):    0.301 ns" in out
    assert "relative-timing slack:   -0.063 ns" in out
    assert "chain length   3: forward 0.505 ns" in out


def test_analyze_reverse_latency_same_for_widths(capsys):
    rev = []
    for n in ("8", "32"):
        code, out, _ = run(capsys, "analyze", "-n", n, "--json")
        assert code == 0
        rev.append(json.loads(out)["latency"]["reverse_max_ps"])
    assert rev[0] == rev[1]


def test_analyze_delay_table_file(tmp_path, capsys):
    table = tmp_path / "slow.dt"
    table.write_text("ao21 0.063 0.200\n")
    code, out, _ = run(capsys, "analyze", "-n", "2", "--delay-table", str(table),
                       "--vector", "3,0,1")
    assert code == 0
    assert "indirect (via carry):    0.438 ns" in out
    assert "relative-timing slack:   -0.200 ns" in out


def test_simulate_vectors_and_vcd(tmp_path, capsys):
    net = tmp_path / "a.net"
    main(["generate", "-n", "2", "-o", str(net)])
    stim = tmp_path / "v.stim"
    stim.write_text("vector 3 1 0\nvector 2 2 1\n")
    vcd = tmp_path / "out.vcd"
    capsys.readouterr()
    code, out, _ = run(capsys, "simulate", str(net), str(stim), "--vcd", str(vcd))
    assert code == 0
    assert "vector 0: (3, 1, 0) -> 4" in out and "vector 1: (2, 2, 1) -> 5" in out
    assert vcd.read_bytes().startswith(b"$version")


def test_simulate_timed_schedule(tmp_path, capsys):
    net = tmp_path / "c.net"
    net.write_text("net a\nnet b\nnet y\ngate c2 a b -> y\n")
    stim = tmp_path / "s.stim"
    stim.write_text("at 0 set a 1\nat 100 set b 1\n")
    code, out, _ = run(capsys, "simulate", str(net), str(stim), "--json")
    data = json.loads(out)
    assert code == 0 and data["end_time_ps"] == 178 and data["quiescent"]


def test_simulate_io_and_parse_errors(tmp_path, capsys):
    code, _, err = run(capsys, "simulate", str(tmp_path / "nope.net"), str(tmp_path / "x"))
    assert code == 3
    bad = tmp_path / "bad.net"
    bad.write_text("net a\ngate or2 a -> a\n")
    stim = tmp_path / "s.stim"
    stim.write_text("")
    code, _, err = run(capsys, "simulate", str(bad), str(stim))
    assert code == 3 and "line 2" in err


def test_argparse_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["verify"])
    assert info.value.code == 2
