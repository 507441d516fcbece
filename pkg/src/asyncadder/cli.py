"""Command-line front end.

Exit codes: 0 pass, 1 verification failure, 2 usage/config error,
3 I/O or parse error.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path
from typing import Dict, List, Optional

from . import __version__
from .adders import build_rca, describe_rca
from .analysis import (check_relative_timing, compute_rt_slack, detect_orphans,
                       fig2_paths, longest_io_delay, measure_latency)
from .errors import NetlistSyntaxError, ProtocolViolation, SimulationError, StructuralError
from .netlist import GateKind, emit_netlist, parse_netlist
from .sim import (DelayTable, FixedDelays, OverrideDelays, RandomBoundedDelays,
                  parse_stimulus, ps_to_ns, run_handshake_cycles, simulate)
from .vcd import export_vcd
from .verify import exhaustive_vectors, random_vectors, verify_adder

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

_KIND_OVERRIDE = re.compile(r"^(or2|ao21|ao22|ao222|c2)_(rise|fall|both)_stage(\d+)$")


class UsageError(Exception):
    pass


def parse_override(spec: str, circuit) -> Dict[str, Dict[str, float]]:
    """``<kind>_<rise|fall|both>_stage<k>=<ns>`` or ``<net>[:rise|:fall]=<ns>``."""
    if "=" not in spec:
        raise UsageError(f"delay override {spec!r} needs '=<ns>'")
    key, value = spec.split("=", 1)
    try:
        ns = float(value)
    except ValueError:
        raise UsageError(f"bad delay value in {spec!r}") from None
    m = _KIND_OVERRIDE.match(key)
    if m:
        kind, direction, stage = GateKind(m.group(1)), m.group(2), m.group(3)
        gates = [g.output for g in circuit.gates
                 if g.kind is kind and g.output.endswith(f"_{stage}")]
        if not gates:
            raise UsageError(f"no {kind} gates in stage {stage}")
    else:
        net, _, direction = key.partition(":")
        direction = direction or "both"
        if direction not in ("rise", "fall", "both"):
            raise UsageError(f"bad direction in {spec!r}")
        gates = [net]
    dirs = ("rise", "fall") if direction == "both" else (direction,)
    return {g: {d: ns for d in dirs} for g in gates}


def _table(args) -> DelayTable:
    if getattr(args, "delay_table", None):
        return DelayTable.from_text(Path(args.delay_table).read_text())
    return DelayTable.default()


def _model(args, circuit):
    table = _table(args)
    model = FixedDelays(table)
    if getattr(args, "jitter", None):
        lo, hi = table.scaled(1 - args.jitter), table.scaled(1 + args.jitter)
        model = RandomBoundedDelays(lo, hi, args.seed)
    overrides: Dict[str, Dict[str, float]] = {}
    for spec in getattr(args, "delay_override", None) or []:
        for gate, d in parse_override(spec, circuit).items():
            overrides.setdefault(gate, {}).update(d)
    if overrides:
        model = OverrideDelays(model, overrides)
    return table, model


def _header(args, table, extra="") -> str:
    seed = getattr(args, "seed", None)
    return (f"# asyncadder {__version__} command={args.command} "
            f"seed={seed} delay_table={table.digest()}{extra}")


def _print_header(args, header: str) -> None:
    # keep stdout parseable in JSON mode
    print(header, file=sys.stderr if getattr(args, "json", False) else sys.stdout)


def _emit(args, text: str, data) -> None:
    if getattr(args, "json", False):
        print(json.dumps(data, indent=2, default=str))
    else:
        print(text)


# -- commands -----------------------------------------------------------------

def cmd_generate(args) -> int:
    if args.n < 1:
        raise UsageError("width must be >= 1")
    circuit, _ = build_rca(args.n, not args.no_encoders, structural_c=args.structural_c,
                           output_detector=args.with_detector)
    text = emit_netlist(circuit)
    counts = circuit.gate_counts()
    summary = (f"{args.n}-bit adder: {len(circuit.gates)} gates ("
               + ", ".join(f"{k} {v}" for k, v in sorted(counts.items())) + ")")
    if args.output:
        Path(args.output).write_text(text)
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.n < 1:
        raise UsageError("width must be >= 1")
    circuit, desc = build_rca(args.n, not args.no_encoders)
    table, model = _model(args, circuit)
    if args.vectors:
        stim = parse_stimulus(Path(args.vectors).read_text())
        vectors = [tuple(v) for v in stim.vectors]
        count, mode = len(vectors), f"file {args.vectors}"
    elif args.random is not None:
        vectors = random_vectors(args.n, args.random, args.seed)
        count, mode = args.random, f"random {args.random}"
    else:
        if args.n > args.cap:
            raise UsageError(f"exhaustive mode is capped at n <= {args.cap}; use --random")
        vectors = exhaustive_vectors(args.n)
        count, mode = 1 << (2 * args.n + 1), "exhaustive"
    _print_header(args, _header(args, table, f" n={args.n} vectors={mode} model={model.describe()!r}"))
    report = verify_adder(args.n, vectors, model, circuit=circuit, desc=desc,
                          full_checks=not args.fast)
    _emit(args, report.to_text(), {**report.to_dict(), "passed": report.passed})
    return EXIT_OK if report.passed else EXIT_FAIL


def _ladder(n: int):
    """Operands whose carry ripples through exactly L propagate stages, L = 0..n."""
    return [((1 << length) - 1, 0, 0) for length in range(n + 1)]


def cmd_analyze(args) -> int:
    if args.n < 1:
        raise UsageError("width must be >= 1")
    circuit, desc = build_rca(args.n, not args.no_encoders)
    table, model = _model(args, circuit)
    direct, indirect = fig2_paths(table)
    slack = compute_rt_slack(table)
    if args.vector:
        try:
            vecs = [tuple(int(x, 0) for x in args.vector.split(","))]
        except ValueError:
            raise UsageError("--vector takes A,B,CIN") from None
        if len(vecs[0]) != 3:
            raise UsageError("--vector takes A,B,CIN")
    else:
        vecs = _ladder(args.n)
    trace, cycles = run_handshake_cycles(circuit, [desc.vector(*v) for v in vecs], model)
    lat = measure_latency(cycles, desc)
    rt = check_relative_timing(trace, desc, circuit, model)
    orphans = detect_orphans(trace, circuit)
    static_fwd = longest_io_delay(circuit, model, "rise")
    _print_header(args, _header(args, table, f" n={args.n}"))
    lines = [
        f"direct sum-reset path:   {ps_to_ns(direct):.3f} ns",
        f"indirect (via carry):    {ps_to_ns(indirect):.3f} ns",
        f"relative-timing slack:   {ps_to_ns(slack):+.3f} ns",
        f"static worst forward:    {ps_to_ns(static_fwd):.3f} ns",
        lat.to_text(),
        rt.to_text() if args.verbose else
        f"relative timing: {'PASS' if rt.passed else 'FAIL'} "
        f"({sum(s.exercised for s in rt.stages)} stage checks)",
        orphans.to_text(),
    ]
    data = {
        "direct_ps": direct, "indirect_ps": indirect, "rt_slack_ps": slack,
        "static_forward_ps": static_fwd, "latency": lat.to_dict(),
        "relative_timing": rt.to_dict(), "orphans": orphans.to_dict(),
    }
    _emit(args, "\n".join(lines), data)
    return EXIT_OK


def cmd_simulate(args) -> int:
    circuit = parse_netlist(Path(args.netlist).read_text(), name=Path(args.netlist).stem)
    stim = parse_stimulus(Path(args.stimulus).read_text())
    table, model = _model(args, circuit)
    _print_header(args, _header(args, table, f" netlist={args.netlist}"))
    if stim.vectors:
        desc = describe_rca(circuit)
        for v in stim.vectors:
            if len(v) != 3:
                raise UsageError("handshake vectors take 'vector <A> <B> <CIN>'")
        trace, cycles = run_handshake_cycles(
            circuit, [desc.vector(*v) for v in stim.vectors], model)
        lat = measure_latency(cycles, desc)
        results = [f"vector {c.index}: {stim.vectors[c.index]} -> {desc.decode(c.outputs)}"
                   for c in cycles]
        text = "\n".join([*results, lat.to_text(),
                          detect_orphans(trace, circuit).to_text()])
        data = {"results": [desc.decode(c.outputs) for c in cycles], "latency": lat.to_dict()}
    else:
        trace = simulate(circuit, stim, model, args.horizon)
        final = trace.final_levels()
        outs = {g.name: [final[n] for n in g.nets] for g in circuit.output_groups}
        text = "\n".join([f"events: {len(trace.events)}, end {trace.end_time} ps, "
                                  f"{'quiescent' if trace.quiescent else 'NON-QUIESCENT'}",
                          *(f"{k}: {v}" for k, v in outs.items())])
        data = {"events": len(trace.events), "end_time_ps": trace.end_time,
                "quiescent": trace.quiescent, "outputs": outs}
    if args.vcd:
        Path(args.vcd).write_bytes(export_vcd(trace, circuit))
    _emit(args, text, data)
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="asyncadder",
                                description="Early-output asynchronous adder toolkit")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def delay_opts(sp):
        sp.add_argument("--delay-table", help="file with lines '<gatekind> <rise_ns> <fall_ns>'")
        sp.add_argument("--delay-override", action="append", metavar="SPEC",
                        help="e.g. ao21_fall_stage1=0.30 or COUT0_1:fall=0.30")
        sp.add_argument("--jitter", type=float,
                        help="draw each gate delay uniformly within +-FRACTION of the table")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--json", action="store_true", help="structured output")

    g = sub.add_parser("generate", help="write the netlist of an n-bit adder")
    g.add_argument("-n", type=int, required=True)
    g.add_argument("--no-encoders", action="store_true")
    g.add_argument("--with-detector", action="store_true")
    g.add_argument("--structural-c", action="store_true",
                   help="realize C-elements as AO222 gates with feedback")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("verify", help="handshake-simulate vectors and check them")
    v.add_argument("-n", type=int, required=True)
    mode = v.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--random", type=int, metavar="COUNT")
    mode.add_argument("--vectors", metavar="FILE")
    v.add_argument("--cap", type=int, default=8, help="largest width for exhaustive mode")
    v.add_argument("--no-encoders", action="store_true")
    v.add_argument("--fast", action="store_true", help="arithmetic and protocol checks only")
    delay_opts(v)
    v.set_defaults(func=cmd_verify)

    a = sub.add_parser("analyze", help="path delays, relative-timing slack and latency")
    a.add_argument("-n", type=int, required=True)
    a.add_argument("--vector", help="A,B,CIN (default: one vector per carry-chain length)")
    a.add_argument("--no-encoders", action="store_true")
    a.add_argument("-v", "--verbose", action="store_true")
    delay_opts(a)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("simulate", help="simulate a netlist file with a stimulus file")
    s.add_argument("netlist")
    s.add_argument("stimulus")
    s.add_argument("--vcd", help="write a value change dump here")
    s.add_argument("--horizon", type=int, help="stop after this many ps")
    delay_opts(s)
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NetlistSyntaxError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except StructuralError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ProtocolViolation, SimulationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
