"""Batch verification of generated adders under the handshake environment."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .adders import build_rca, describe_rca
from .analysis import (_Report, check_phase_monotonicity, check_relative_timing,
                       detect_orphans)
from .errors import ProtocolViolation
from .sim import as_delay_model, run_handshake_cycles

Vector = Tuple[int, int, int]


def exhaustive_vectors(n: int) -> Iterator[Vector]:
    for a, b, cin in itertools.product(range(1 << n), range(1 << n), (0, 1)):
        yield a, b, cin


def random_vectors(n: int, count: int, seed: int) -> List[Vector]:
    """Uniform operands and carry-in, reproducible from ``seed``."""
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 1 << n, size=count, dtype=np.uint64)
    b = rng.integers(0, 1 << n, size=count, dtype=np.uint64)
    c = rng.integers(0, 2, size=count)
    return [(int(x), int(y), int(z)) for x, y, z in zip(a, b, c)]


@dataclass
class Failure:
    check: str
    vector_index: Optional[int]
    vector: Optional[Vector]
    detail: str
    excerpt: List[str] = field(default_factory=list)


@dataclass
class VerifyReport(_Report):
    width: int
    vectors: int = 0
    mismatches: int = 0
    protocol_violations: int = 0
    monotonicity_violations: int = 0
    orphans: int = 0
    rt_violations: int = 0
    failures: List[Failure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not (self.mismatches or self.protocol_violations or self.monotonicity_violations
                    or self.orphans or self.rt_violations)

    def _fail(self, failure: Failure, keep: int = 20):
        if len(self.failures) < keep:
            self.failures.append(failure)

    def to_text(self) -> str:
        lines = [
            f"verify {self.width}-bit: {'PASS' if self.passed else 'FAIL'} "
            f"({self.vectors} vectors)",
            f"  arithmetic mismatches:   {self.mismatches}",
            f"  protocol violations:     {self.protocol_violations}",
            f"  non-monotonic events:    {self.monotonicity_violations}",
            f"  orphans:                 {self.orphans}",
            f"  relative-timing faults:  {self.rt_violations}",
        ]
        if self.failures:
            f = self.failures[0]
            lines.append(f"first counterexample: {f.check} at vector #{f.vector_index} "
                         f"{f.vector}: {f.detail}")
            lines.extend("    " + x for x in f.excerpt)
        return "\n".join(lines)


def _excerpt(trace, around: int, width: int = 8) -> List[str]:
    events = trace.events
    if not events:
        return []
    lo = max(0, around - width)
    return [f"{e.time:>8d} ps  {e.net:<12s} -> {e.level}" for e in events[lo:around + width]]


def verify_adder(n: int, vectors: Iterable[Vector], delay_model=None, *,
                 include_encoders: bool = True, full_checks: bool = True,
                 batch: int = 512, circuit=None, desc=None) -> VerifyReport:
    """Run ``vectors`` through the n-bit adder and check every cycle.

    Always checks the arithmetic result and the protocol (no INVALID code
    word, no stalled handshake).  With ``full_checks`` also checks phase
    monotonicity, orphan freedom and relative-timing ordering; these need
    recorded traces and are slower.  Vectors run in independent batches of
    ``batch`` cycles, each starting from reset.
    """
    if circuit is None:
        circuit, desc = build_rca(n, include_encoders)
    elif desc is None:
        desc = describe_rca(circuit)
    model = as_delay_model(delay_model)
    report = VerifyReport(width=n)
    it = iter(vectors)
    base = 0
    while True:
        chunk = list(itertools.islice(it, batch))
        if not chunk:
            break
        try:
            trace, cycles = run_handshake_cycles(
                circuit, [desc.vector(*v) for v in chunk], model, record=full_checks)
        except ProtocolViolation as exc:
            report.protocol_violations += 1
            report.vectors += len(chunk)
            report._fail(Failure("protocol", base, chunk[0], str(exc),
                                 [f"{e.time:>8d} ps  {e.net:<12s} -> {e.level}"
                                  for e in exc.events]))
            base += len(chunk)
            continue
        report.vectors += len(chunk)
        for c, v in zip(cycles, chunk):
            expected = v[0] + v[1] + v[2]
            try:
                got = desc.decode(c.outputs)
            except ValueError as exc:
                got = str(exc)
            if got != expected:
                report.mismatches += 1
                report._fail(Failure("arithmetic", base + c.index, v,
                                     f"decoded {got}, expected {expected}"))
        if full_checks:
            bad = check_phase_monotonicity(trace)
            report.monotonicity_violations += len(bad)
            if bad:
                e = trace.events[bad[0]]
                p = trace.phase_of_event(bad[0])
                report._fail(Failure("monotonicity", base + p.cycle, chunk[p.cycle],
                                     f"{e.net} -> {e.level} during {p.kind} phase",
                                     _excerpt(trace, bad[0])))
            orphans = detect_orphans(trace, circuit)
            report.orphans += len(orphans)
            if orphans:
                o = orphans.orphans[0]
                cyc = trace.phases[o.phase].cycle
                report._fail(Failure("orphan", base + cyc, chunk[cyc],
                                     f"{o.kind} on {o.net} at {o.time} ps: {o.explanation}"))
            rt = check_relative_timing(trace, desc, circuit, model)
            report.rt_violations += len(rt.violations)
            for s in rt.violations[:1]:
                report._fail(Failure(
                    "relative-timing", base + s.cycle, chunk[s.cycle],
                    f"{s.carry_net} falls at {s.carry_fall} ps, not before "
                    f"{s.sum_net} at {s.sum_fall} ps"))
        base += len(chunk)
    return report
