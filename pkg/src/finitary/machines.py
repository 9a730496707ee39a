"""Library of canonical machines: Golden Mean, Even, SNS, beam splitter, trapped ions."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .quantum import QuantumMachine
from .stochastic import StochasticMachine

_S = 1 / np.sqrt(2)
_H = np.array([[1, 1], [1, -1]]) * _S


@dataclass(frozen=True)
class ExampleMachine:
    name: str
    machine: StochasticMachine | QuantumMachine
    note: str


def golden_mean_sdr() -> ExampleMachine:
    T0 = [[0, 0, 1 / 3], [0, 0, 1 / 2], [0, 0, 0]]
    T1 = [[0, 2 / 3, 0], [0, 1 / 2, 0], [0, 1, 0]]
    m = StochasticMachine.recognizer(("s0", "s1", "s2"), {"0": T0, "1": T1}, [1, 0, 0], name="golden-mean-sdr")
    return ExampleMachine(m.name, m, "three-state recognizer; no two consecutive 0s; start state s0 is transient")


def golden_mean_sdg() -> ExampleMachine:
    T0 = [[0, 1 / 2], [0, 0]]
    T1 = [[1 / 2, 0], [1, 0]]
    m = StochasticMachine.generator(("A", "B"), {"0": T0, "1": T1}, [2 / 3, 1 / 3], name="golden-mean-sdg")
    return ExampleMachine(m.name, m, "recurrent part of the Golden Mean machine, stationary start")


def even_sdg() -> ExampleMachine:
    T0 = [[1 / 2, 0], [0, 0]]
    T1 = [[0, 1 / 2], [1, 0]]
    m = StochasticMachine.generator(("A", "B"), {"0": T0, "1": T1}, [2 / 3, 1 / 3], name="even-sdg")
    return ExampleMachine(m.name, m, "blocks of an even number of 1s between 0s, stationary start")


def sns_sg() -> ExampleMachine:
    # 0-edges all enter A and A never emits a 0, so after 0 1^k the machine is in A
    # or B and the next-0 probability is 0 or 1/2 depending on the hidden path.
    T0 = [[0, 0], [1 / 2, 0]]
    T1 = [[1 / 2, 1 / 2], [0, 1 / 2]]
    m = StochasticMachine.generator(("A", "B"), {"0": T0, "1": T1}, [1 / 2, 1 / 2], name="sns-sg")
    return ExampleMachine(m.name, m, "simple nondeterministic source; edge probabilities reconstructed")


def biased_coin_sdg() -> ExampleMachine:
    p = _S
    m = StochasticMachine.generator(("A",), {"0": [[p]], "1": [[1 - p]]}, [1], name="biased-coin-sdg")
    return ExampleMachine(m.name, m, "Prob(0) = 1/sqrt(2); irrational, so no quantum deterministic generator exists")


def spin_one_unitary() -> np.ndarray:
    """Rotation about y by pi/4 followed by rotation about x by pi/2."""
    return np.array([[_S, _S, 0], [0, 0, -1], [-_S, _S, 0]], dtype=complex)


def golden_mean_qdg() -> ExampleMachine:
    # P(0) is the rank-1 projector: it is the labeling that reproduces the
    # displayed T(0) = U P(0) and Prob(0) = 1/3.
    m = QuantumMachine(
        "QG",
        ("A", "B", "C"),
        ("clock",),
        ("0", "1"),
        {"clock": spin_one_unitary()},
        {"0": (1,), "1": (0, 2)},
        [1, 0, 0],
        name="golden-mean-qdg",
    )
    return ExampleMachine(m.name, m, "spin-1 particle, measuring whether the squared y spin component is zero")


def even_qdg() -> ExampleMachine:
    m = QuantumMachine(
        "QG",
        ("A", "B", "C"),
        ("clock",),
        ("0", "1"),
        {"clock": spin_one_unitary()},
        {"0": (0,), "1": (1, 2)},
        [1, 0, 0],
        name="even-qdg",
    )
    return ExampleMachine(m.name, m, "same unitary as the Golden Mean machine, squared x spin component measured")


def beam_splitter_qdg() -> ExampleMachine:
    m = QuantumMachine(
        "QG", ("A", "B"), ("clock",), ("0", "1"), {"clock": _H}, {"0": (0,), "1": (1,)}, [1, 0], name="beam-splitter"
    )
    return ExampleMachine(m.name, m, "photon in an iterated beam splitter; 0 = upper path, 1 = lower path")


def balanced_oracle() -> np.ndarray:
    return np.diag([1, 1, -1, -1]).astype(complex)


def trapped_ion_qt(oracle: np.ndarray | None = None) -> ExampleMachine:
    """Two trapped ions; input b applies ``oracle`` (the balanced phase flip by default)."""
    Ua = np.kron(_H, _H)
    Ub = balanced_oracle() if oracle is None else np.asarray(oracle, dtype=complex)
    Uc = np.kron(_H, np.eye(2))
    m = QuantumMachine(
        "QT",
        ("A", "B", "C", "D"),
        ("a", "b", "c"),
        ("0", "1"),
        {"a": Ua, "b": Ub, "c": Uc},
        {"0": (0, 1), "1": (2, 3)},
        [0, 1, 0, 0],
        name="trapped-ion",
    )
    return ExampleMachine(m.name, m, "measures the electronic level of ion 1; start <0100|")


EXAMPLES: dict[str, Callable[[], ExampleMachine]] = {
    "golden-mean-sdr": golden_mean_sdr,
    "golden-mean-sdg": golden_mean_sdg,
    "even-sdg": even_sdg,
    "sns-sg": sns_sg,
    "biased-coin-sdg": biased_coin_sdg,
    "golden-mean-qdg": golden_mean_qdg,
    "even-qdg": even_qdg,
    "beam-splitter": beam_splitter_qdg,
    "trapped-ion": trapped_ion_qt,
}


def example(name: str) -> ExampleMachine:
    try:
        return EXAMPLES[name]()
    except KeyError:
        raise KeyError(f"unknown example {name!r}; choose from {sorted(EXAMPLES)}") from None


def stochastic_examples() -> list[StochasticMachine]:
    return [f().machine for f in EXAMPLES.values() if isinstance(f().machine, StochasticMachine)]


def quantum_examples() -> list[QuantumMachine]:
    return [f().machine for f in EXAMPLES.values() if isinstance(f().machine, QuantumMachine)]
