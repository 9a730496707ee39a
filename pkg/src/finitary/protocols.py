"""Measurement protocols for quantum machines, and the Deutsch algorithm run on the ion trap."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matcore
from .exceptions import MachineError
from .proclang import WordDistribution, enumerate_distribution
from .quantum import QuantumMachine
from .stochastic import StochasticMachine


@dataclass(frozen=True)
class MeasurementProtocol:
    """A periodic schedule of ``(input symbol, measured?)`` steps.

    ``repeat`` bounds how many periods may run; ``None`` lets the schedule repeat
    for as long as the requested word length needs.
    """

    period: tuple[tuple[str, bool], ...]
    repeat: int | None = None

    def __post_init__(self):
        period = tuple((str(x), bool(meas)) for x, meas in self.period)
        object.__setattr__(self, "period", period)
        if not period:
            raise MachineError("protocol period must be non-empty")
        if not any(meas for _, meas in period):
            raise MachineError("protocol period must contain a measured step")
        if self.repeat is not None and self.repeat < 1:
            raise MachineError("protocol repeat count must be positive")

    @property
    def measurements_per_period(self) -> int:
        return sum(meas for _, meas in self.period)

    def schedule(self, L: int) -> list[tuple[str, bool]]:
        """Steps up to and including the L-th measurement."""
        if self.repeat is not None and L > self.repeat * self.measurements_per_period:
            raise MachineError(f"protocol allows at most {self.repeat * self.measurements_per_period} observations")
        steps: list[tuple[str, bool]] = []
        seen = 0
        while seen < L:
            for x, meas in self.period:
                steps.append((x, meas))
                seen += meas
                if seen == L:
                    break
        return steps

    def check(self, m) -> None:
        unknown = {x for x, _ in self.period} - set(m.inputs)
        if unknown:
            raise MachineError(f"protocol uses unknown input symbols {sorted(unknown)}")

    @classmethod
    def every_step(cls, m) -> MeasurementProtocol:
        """Protocol I: measure after every operation, cycling through the inputs."""
        return cls(tuple((x, True) for x in m.inputs))

    @classmethod
    def once_per_cycle(cls, m) -> MeasurementProtocol:
        """Protocol II: run the input cycle and measure only after its last operation.

        A single-input machine measures every second step.
        """
        xs = list(m.inputs) if len(m.inputs) > 1 else [m.inputs[0]] * 2
        return cls(tuple((x, i == len(xs) - 1) for i, x in enumerate(xs)))

    @classmethod
    def named(cls, name: str, m) -> MeasurementProtocol:
        key = name.strip().upper()
        if key in ("I", "1"):
            return cls.every_step(m)
        if key in ("II", "2"):
            return cls.once_per_cycle(m)
        raise MachineError(f"unknown protocol name {name!r}; use I or II")

    def to_dict(self) -> dict:
        out: dict = {"period": [{"x": x, "measure": meas} for x, meas in self.period]}
        if self.repeat is not None:
            out["repeat"] = self.repeat
        return out

    @classmethod
    def from_dict(cls, data: dict) -> MeasurementProtocol:
        try:
            period = tuple((step["x"], step["measure"]) for step in data["period"])
            repeat = data.get("repeat")
        except (KeyError, TypeError, AttributeError) as exc:
            raise MachineError(f"malformed protocol: {exc}") from None
        if any(not isinstance(meas, bool) for _, meas in period):
            raise MachineError("protocol 'measure' flags must be booleans")
        return cls(period, None if repeat is None else int(repeat))


def run_protocol(m: QuantumMachine, p: MeasurementProtocol, L: int, start=None) -> WordDistribution:
    """Distribution of length-L observed words when ``m`` is driven by ``p``.

    Starts from the stationary mixed state unless ``start`` is given (``"start"`` for
    the machine's own start vector). Unmeasured steps never appear in the words.
    """
    if m.kind == "QR":
        raise MachineError("protocols drive transducers and generators, not recognizers")
    p.check(m)
    return enumerate_distribution(m, L, p, start=start)


def run_protocol_classical(m: StochasticMachine, p: MeasurementProtocol, L: int) -> WordDistribution:
    """A classical generator under the same schedule: unmeasured outputs are summed out."""
    if m.kind != "SG":
        raise MachineError("classical protocol runs need a stochastic generator")
    steps = [(m.inputs[0], meas) for _, meas in p.schedule(L)]
    full = enumerate_distribution(m, len(steps))
    return full.marginal([i for i, (_, meas) in enumerate(steps) if meas])


@dataclass(frozen=True)
class DeutschResult:
    outcome: str | None
    probability: float
    probabilities: dict[str, float]

    @property
    def statement(self) -> str | None:
        # outcome 0 reads as statement A, 1 as statement B
        return {"0": "A", "1": "B"}.get(self.outcome) if self.outcome is not None else None


def deutsch_run(oracle: np.ndarray, tol: float = matcore.ZERO_TOL) -> DeutschResult:
    """Two-qubit Deutsch algorithm in the ion-trap basis.

    Start in <0100|, apply H (x) H, the oracle, then H (x) I, and measure ion 1.
    """
    oracle = matcore.as_matrix(oracle)
    if oracle.shape != (4, 4):
        raise MachineError(f"oracle must be 4x4, got {oracle.shape}")
    if not matcore.is_unitary(oracle):
        raise MachineError("oracle is not unitary")
    H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    psi = np.array([0, 1, 0, 0], dtype=complex)
    psi = psi @ np.kron(H, H) @ oracle @ np.kron(H, np.eye(2))
    probs = {"0": float(np.sum(np.abs(psi[:2]) ** 2)), "1": float(np.sum(np.abs(psi[2:]) ** 2))}
    for y, p in probs.items():
        if p >= 1.0 - tol:
            return DeutschResult(y, p, probs)
    return DeutschResult(None, max(probs.values()), probs)
