"""Classical stochastic machines: transducers (ST), recognizers (SR) and generators (SG).

A machine holds one substochastic matrix ``T(y|x)`` per output/input pair. Row
vectors are state distributions and evolve by right multiplication, so the
probability of a word is ``<pi| T(w_0) ... T(w_{L-1}) |eta>`` with ``|eta>`` the
all-ones column.

Recognizers have the single output ``accept`` and are driven by input words;
generators have a single clock input and emit output words.
"""

from __future__ import annotations

import enum
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from . import matcore
from ._words import split_word
from .exceptions import DimensionError, MachineError, RecurrenceError

ACCEPT = "accept"
CLOCK = "clock"
KINDS = ("ST", "SR", "SG")


class StateClass(str, enum.Enum):
    TRANSIENT = "transient"
    ASYMPTOTICALLY_RECURRENT = "asymptotically_recurrent"
    TRANSIENT_RECURRENT = "transient_recurrent"


@dataclass(frozen=True, eq=False)
class StochasticMachine:
    """A validated stochastic finite-state machine.

    ``matrices`` is keyed by ``(y, x)``; pairs left out are taken to be all-zero.
    Arrays are copied, made real and frozen on construction.
    """

    kind: str
    states: tuple[str, ...]
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    matrices: Mapping[tuple[str, str], np.ndarray]
    initial: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "states", tuple(self.states))
        set_(self, "inputs", tuple(self.inputs))
        set_(self, "outputs", tuple(self.outputs))
        if self.kind not in KINDS:
            raise MachineError(f"unknown stochastic machine kind {self.kind!r}")
        for label, seq in (("states", self.states), ("inputs", self.inputs), ("outputs", self.outputs)):
            if not seq:
                raise MachineError(f"{label} must be non-empty")
            if len(set(seq)) != len(seq):
                raise MachineError(f"duplicate {label}: {list(seq)}")
        if self.kind == "SR" and len(self.outputs) != 1:
            raise MachineError("a recognizer has exactly one output symbol")
        if self.kind == "SG" and len(self.inputs) != 1:
            raise MachineError("a generator has exactly one input symbol")

        n = len(self.states)
        mats = {}
        for key, M in self.matrices.items():
            y, x = key
            if y not in self.outputs or x not in self.inputs:
                raise MachineError(f"matrix key {y}|{x} outside the alphabets")
            M = matcore.as_matrix(M)
            if M.shape != (n, n):
                raise DimensionError(f"T({y}|{x}) has shape {M.shape}, expected {(n, n)}")
            if not matcore.is_substochastic(M):
                raise MachineError(f"T({y}|{x}) is not substochastic")
            mats[(y, x)] = M.real.copy()
        for y in self.outputs:
            for x in self.inputs:
                mats.setdefault((y, x), np.zeros((n, n)))
        for M in mats.values():
            M.flags.writeable = False
        set_(self, "matrices", mats)

        if self.kind == "SR":
            # recognizer matrices carry the input probabilities, so they sum to T over x
            if not matcore.is_stochastic(sum(mats.values())):
                raise MachineError("sum over inputs of T(x) is not stochastic")
        else:
            for x in self.inputs:
                total = sum(mats[(y, x)] for y in self.outputs)
                if not matcore.is_stochastic(total):
                    raise MachineError(f"sum over outputs of T(y|{x}) is not stochastic")

        pi = matcore.as_vector(self.initial)
        if pi.shape != (n,):
            raise DimensionError(f"initial distribution has {pi.shape[0]} entries, expected {n}")
        if np.any(np.abs(pi.imag) > matcore.DEFAULT_TOL) or np.any(pi.real < -matcore.DEFAULT_TOL):
            raise MachineError("initial distribution must be real and non-negative")
        if abs(pi.real.sum() - 1.0) > matcore.DEFAULT_TOL:
            raise MachineError("initial distribution must sum to 1")
        pi = pi.real.copy()
        pi.flags.writeable = False
        set_(self, "initial", pi)

    @classmethod
    def generator(cls, states, matrices: Mapping[str, np.ndarray], initial, name: str = "", clock: str = CLOCK):
        outputs = tuple(matrices)
        return cls("SG", states, (clock,), outputs, {(y, clock): T for y, T in matrices.items()}, initial, name)

    @classmethod
    def recognizer(cls, states, matrices: Mapping[str, np.ndarray], initial, name: str = "", accept: str = ACCEPT):
        inputs = tuple(matrices)
        return cls("SR", states, inputs, (accept,), {(accept, x): T for x, T in matrices.items()}, initial, name)

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def alphabet(self) -> tuple[str, ...]:
        """Symbols making up the words this machine assigns probabilities to."""
        return self.inputs if self.kind == "SR" else self.outputs

    def matrix(self, symbol: str | None, x: str | None = None) -> np.ndarray:
        """Transition matrix for one word symbol.

        For transducers ``x`` names the input read alongside output ``symbol``.
        ``symbol=None`` marginalizes over the outputs (an unobserved step).
        """
        if self.kind == "SR":
            if symbol is None:
                return sum(self.matrices[(self.outputs[0], a)] for a in self.inputs)
            return self.matrices[(self.outputs[0], symbol)]
        if x is None:
            if len(self.inputs) != 1:
                raise MachineError("transducer words need an input symbol per step")
            x = self.inputs[0]
        if symbol is None:
            return sum(self.matrices[(y, x)] for y in self.outputs)
        return self.matrices[(symbol, x)]

    def state_index(self, state: str | int) -> int:
        if isinstance(state, (int, np.integer)):
            if not 0 <= state < self.n:
                raise MachineError(f"state index {state} out of range")
            return int(state)
        try:
            return self.states.index(state)
        except ValueError:
            raise MachineError(f"unknown state {state!r}") from None

    def distribution(self, start=None) -> np.ndarray:
        """Resolve ``start`` (None, a state, or a vector) to a probability row vector."""
        if start is None:
            return self.initial
        if isinstance(start, (str, int, np.integer)):
            pi = np.zeros(self.n)
            pi[self.state_index(start)] = 1.0
            return pi
        pi = np.real(matcore.as_vector(start))
        if pi.shape != (self.n,):
            raise DimensionError(f"start vector has {pi.shape[0]} entries, expected {self.n}")
        return pi

    def step_matrices(self, word, inputs=None) -> list[np.ndarray]:
        symbols = split_word(word, self.alphabet, allow_lambda=True)
        if self.kind == "ST" and len(self.inputs) > 1:
            if inputs is None:
                raise MachineError("transducer words need an input word")
            xs = split_word(inputs, self.inputs)
            if len(xs) != len(symbols):
                raise MachineError("input and output words differ in length")
        else:
            xs = [None] * len(symbols)
        return [self.matrix(s, x) for s, x in zip(symbols, xs)]


def state_to_state_matrix(m: StochasticMachine, x: str | None = None) -> np.ndarray:
    """Sum of the transition matrices for one driving step; a stochastic matrix."""
    if m.kind == "SR":
        return m.matrix(None)
    return m.matrix(None, x)


def word_probability(m: StochasticMachine, word, start=None, inputs=None) -> float:
    """``<start| T(w_0)...T(w_{L-1}) |eta>``; the empty word has probability 1."""
    pi = m.distribution(start)
    for T in m.step_matrices(word, inputs):
        pi = pi @ T
    return float(pi.sum())


def is_deterministic(m: StochasticMachine, tol: float = matcore.ZERO_TOL) -> bool:
    return all(np.all(np.sum(np.abs(T) > tol, axis=1) <= 1) for T in m.matrices.values())


def word_probability_deterministic(m: StochasticMachine, word, start_state, inputs=None) -> float:
    """Follow the unique state path of ``word`` and multiply its edge probabilities."""
    if not is_deterministic(m):
        raise MachineError("path formula needs a deterministic machine")
    s = m.state_index(start_state)
    p = 1.0
    for T in m.step_matrices(word, inputs):
        row = T[s]
        nz = np.flatnonzero(np.abs(row) > matcore.ZERO_TOL)
        if nz.size == 0:
            return 0.0
        s = int(nz[0])
        p *= float(row[s])
    return p


def conditional_probability(m: StochasticMachine, word, symbol: str, start=None, inputs=None) -> float:
    """``Prob(symbol | word)``, taken to be 0 when ``word`` itself has probability 0.

    For transducers ``inputs`` covers ``word`` plus the extra step.
    """
    prefix = split_word(word, m.alphabet)
    p_w = word_probability(m, prefix, start, None if inputs is None else split_word(inputs, m.inputs)[:-1])
    if p_w <= 0.0:
        return 0.0
    return word_probability(m, prefix + [symbol], start, inputs) / p_w


def adjacency(m: StochasticMachine) -> np.ndarray:
    """Edge i -> j whenever some ``T_ij(y|x) > 0``."""
    return sum(m.matrices.values()) > 0


def classify_states(m: StochasticMachine) -> dict[str, StateClass]:
    R = matcore.reachability(adjacency(m))
    out = {}
    for i, name in enumerate(m.states):
        consequents = np.flatnonzero(R[i])
        transient = any(not R[j, i] for j in consequents)
        recurrent = any(R[j, i] for j in consequents)
        if transient and recurrent:
            out[name] = StateClass.TRANSIENT_RECURRENT
        elif recurrent:
            out[name] = StateClass.ASYMPTOTICALLY_RECURRENT
        else:
            # a validated machine has an outgoing edge from every state,
            # so a non-recurrent state always has a consequent it cannot return from
            out[name] = StateClass.TRANSIENT
    return out


def recurrent_classes(m: StochasticMachine) -> list[list[str]]:
    return [[m.states[i] for i in c] for c in matcore.closed_classes(adjacency(m))]


def restrict_to_recurrent(m: StochasticMachine) -> StochasticMachine:
    """Drop transient states and start from the stationary distribution."""
    classes = matcore.closed_classes(adjacency(m))
    if len(classes) != 1:
        named = [[m.states[i] for i in c] for c in classes]
        raise RecurrenceError(f"expected one asymptotically recurrent class, found {named}")
    keep = classes[0]
    idx = np.ix_(keep, keep)
    mats = {key: T[idx] for key, T in m.matrices.items()}
    states = tuple(m.states[i] for i in keep)
    # any driving symbol works for the stationary vector of a generator/recognizer;
    # for transducers use the first input
    T = sum(mats[(y, m.inputs[0])] for y in m.outputs) if m.kind != "SR" else sum(mats.values())
    pi = matcore.stationary_left_eigenvector(T)
    return StochasticMachine(m.kind, states, m.inputs, m.outputs, mats, pi, m.name)

