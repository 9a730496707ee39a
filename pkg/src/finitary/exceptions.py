"""Exception hierarchy shared by all machine classes."""


class MachineError(ValueError):
    """A machine, matrix or word violates a structural requirement."""


class DimensionError(MachineError):
    """Matrix or vector shapes are incompatible."""


class UnknownSymbolError(MachineError):
    """A word uses a symbol outside the machine's alphabet."""


class RecurrenceError(MachineError):
    """The state graph does not have exactly one asymptotically recurrent class."""


class ConvergenceError(RuntimeError):
    """Power iteration hit its iteration cap."""


class EnumerationLimitError(ValueError):
    """A word enumeration would exceed the configured word cap."""
