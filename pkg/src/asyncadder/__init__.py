"""Event-driven gate-level simulation and verification of early-output
dual-rail / 1-of-4 asynchronous adders."""

__version__ = "0.1.0"

from .errors import (NetlistSyntaxError, OscillationError, ProtocolViolation,
                     SimulationError, StructuralError)
from .codes import (CodeClass, DualRail, OneOfFour, classify, decode_dual_rail,
                    decode_one_of_four, encode_dual_rail, encode_one_of_four)
from .netlist import (Circuit, Gate, GateKind, PortGroup, check_circuit, emit_netlist,
                      expand_c_elements, parse_netlist, validate_circuit)
from .sim import (DelayTable, FixedDelays, OverrideDelays, RandomBoundedDelays, Stimulus,
                  Trace, parse_stimulus, run_handshake_cycles, simulate)
from .adders import (RcaDescriptor, build_completion_detector, build_full_adder,
                     build_rca, carry_chain_length, describe_rca)
from .analysis import (check_monotonic_cover, check_relative_timing, classify_indication,
                       compute_rt_slack, detect_orphans, fig2_paths, measure_latency,
                       rt_constraint_holds, static_path_delay)
from .vcd import export_vcd
from .verify import exhaustive_vectors, random_vectors, verify_adder
