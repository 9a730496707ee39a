"""Stochastic and quantum finite-state machines for process languages."""

from .exceptions import (
    ConvergenceError,
    DimensionError,
    EnumerationLimitError,
    MachineError,
    RecurrenceError,
    UnknownSymbolError,
)
from .machines import EXAMPLES, ExampleMachine, example
from .proclang import WordDistribution, enumerate_distribution
from .protocols import MeasurementProtocol, deutsch_run, run_protocol
from .quantum import QuantumMachine
from .stochastic import StochasticMachine

__version__ = "0.1.0"

__all__ = [
    "EXAMPLES",
    "ConvergenceError",
    "DimensionError",
    "EnumerationLimitError",
    "ExampleMachine",
    "MachineError",
    "MeasurementProtocol",
    "QuantumMachine",
    "RecurrenceError",
    "StochasticMachine",
    "UnknownSymbolError",
    "WordDistribution",
    "deutsch_run",
    "enumerate_distribution",
    "example",
    "run_protocol",
]
