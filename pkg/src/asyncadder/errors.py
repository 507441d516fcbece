"""Exception types shared across the package."""


class StructuralError(ValueError):
    """A circuit or code group is malformed (arity, dangling nets, cycles...)."""


class NetlistSyntaxError(StructuralError):
    """Netlist or stimulus text could not be parsed."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class SimulationError(RuntimeError):
    """The event-driven engine could not complete a run."""


class OscillationError(SimulationError):
    """A net toggled more often than the configured bound within one phase."""


class ProtocolViolation(SimulationError):
    """An output group reached an INVALID code word, or the handshake stalled."""

    def __init__(self, message, events=()):
        super().__init__(message)
        self.events = list(events)
