"""Quantum finite-state machines: transducers (QT), generators (QG) and recognizers (QR).

State vectors are bra (row) vectors evolving by right multiplication, matching the
classical machines: one step reading ``x`` and observing ``y`` maps ``<psi|`` to
``<psi| U(x) P(y)``. Projectors are stored as sets of basis indices, so every
measurement is diagonal in the machine's basis by construction. ``None`` in an
output word is the null symbol: the unitary acts but nothing is measured.

A QR is stored with a single unitary and one projector per input symbol, since
its transition matrices are ``T(x) = U P(x)``.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from . import matcore
from ._words import split_word
from .exceptions import DimensionError, MachineError
from .stochastic import StochasticMachine

KINDS = ("QT", "QG", "QR")
ACCEPT = "accept"


@dataclass(frozen=True, eq=False)
class QuantumMachine:
    kind: str
    states: tuple[str, ...]
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    unitaries: Mapping[str, np.ndarray]
    projectors: Mapping[str, tuple[int, ...]]
    start: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "states", tuple(self.states))
        set_(self, "inputs", tuple(self.inputs))
        set_(self, "outputs", tuple(self.outputs))
        if self.kind not in KINDS:
            raise MachineError(f"unknown quantum machine kind {self.kind!r}")
        for label, seq in (("states", self.states), ("inputs", self.inputs), ("outputs", self.outputs)):
            if not seq:
                raise MachineError(f"{label} must be non-empty")
            if len(set(seq)) != len(seq):
                raise MachineError(f"duplicate {label}: {list(seq)}")
        n = len(self.states)

        if self.kind == "QR":
            if len(self.unitaries) != 1:
                raise MachineError("a quantum recognizer has exactly one unitary")
            if len(self.outputs) != 1:
                raise MachineError("a quantum recognizer has exactly one output symbol")
            measured = self.inputs
        else:
            if self.kind == "QG" and len(self.inputs) != 1:
                raise MachineError("a quantum generator has exactly one input symbol")
            if set(self.unitaries) != set(self.inputs):
                raise MachineError(f"need one unitary per input symbol {list(self.inputs)}")
            measured = self.outputs

        unitaries = {}
        for x, U in self.unitaries.items():
            U = matcore.as_matrix(U)
            if U.shape != (n, n):
                raise DimensionError(f"U({x}) has shape {U.shape}, expected {(n, n)}")
            if not matcore.is_unitary(U):
                raise MachineError(f"U({x}) is not unitary")
            U.flags.writeable = False
            unitaries[x] = U
        set_(self, "unitaries", unitaries)

        if set(self.projectors) != set(measured):
            raise MachineError(f"need one projector per symbol {list(measured)}")
        if len(measured) > n:
            raise MachineError(f"alphabet of {len(measured)} symbols exceeds dimension {n}")
        projectors = {}
        covered: list[int] = []
        for y, idx in self.projectors.items():
            idx = tuple(sorted(int(i) for i in idx))
            if not idx:
                raise MachineError(f"projector P({y}) is empty")
            if any(not 0 <= i < n for i in idx):
                raise MachineError(f"projector P({y}) has indices outside 0..{n - 1}")
            projectors[y] = idx
            covered.extend(idx)
        if sorted(covered) != list(range(n)):
            raise MachineError("projectors must partition the basis states")
        set_(self, "projectors", projectors)

        psi = matcore.as_vector(self.start)
        if psi.shape != (n,):
            raise DimensionError(f"start vector has {psi.shape[0]} entries, expected {n}")
        if abs(np.vdot(psi, psi).real - 1.0) > matcore.DEFAULT_TOL:
            raise MachineError("start vector must have unit norm")
        psi.flags.writeable = False
        set_(self, "start", psi)

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self.inputs if self.kind == "QR" else self.outputs

    def projector(self, y: str | None) -> np.ndarray:
        if y is None:
            return np.eye(self.n, dtype=complex)
        if y not in self.projectors:
            raise MachineError(f"no projector for symbol {y!r}")
        return matcore.projector(self.projectors[y], self.n)

    def unitary(self, x: str | None = None) -> np.ndarray:
        if self.kind == "QR":
            return next(iter(self.unitaries.values()))
        if x is None:
            if len(self.inputs) != 1:
                raise MachineError("machines with several inputs need an input symbol per step")
            x = self.inputs[0]
        if x not in self.unitaries:
            raise MachineError(f"unknown input symbol {x!r}")
        return self.unitaries[x]

    def step_operators(self, word, inputs=None) -> list[np.ndarray]:
        symbols = split_word(word, self.alphabet, allow_lambda=True)
        if self.kind == "QR" or len(self.inputs) == 1:
            xs = [None] * len(symbols)
        else:
            if inputs is None:
                raise MachineError("transducer words need an input word")
            xs = split_word(inputs, self.inputs)
            if len(xs) != len(symbols):
                raise MachineError("input and output words differ in length")
        return [transition_operator(self, x, y) for x, y in zip(xs, symbols)]


def transition_operator(m: QuantumMachine, x: str | None, y: str | None = None) -> np.ndarray:
    """``T(y|x) = U(x) P(y)``; ``y=None`` means no measurement.

    For recognizers pass the read symbol as ``y`` (``x`` is ignored), giving ``U P(y)``.
    """
    return m.unitary(x) @ m.projector(y)


def word_operator(m: QuantumMachine, word, inputs=None) -> np.ndarray:
    T = np.eye(m.n, dtype=complex)
    for step in m.step_operators(word, inputs):
        T = T @ step
    return T


def evolve(psi: np.ndarray, m: QuantumMachine, x: str | None, y: str | None):
    """One time step from a pure state.

    Returns ``(psi', p)`` where ``p`` is the probability of observing ``y``. When the
    outcome is impossible ``psi'`` is ``None`` and ``p`` is 0.
    """
    phi = np.asarray(psi, dtype=complex) @ transition_operator(m, x, y)
    p = float(np.vdot(phi, phi).real)
    if p <= matcore.ZERO_TOL:
        return None, 0.0
    return phi / np.sqrt(p), p


def _start_density(m: QuantumMachine, start) -> np.ndarray:
    if start is None:
        psi = m.start
    else:
        start = np.asarray(start, dtype=complex)
        if start.ndim == 2:
            return start
        psi = start
    # |psi><psi| for the row vector <psi|
    return np.outer(psi.conj(), psi)


def probability_from(rho: np.ndarray, T: np.ndarray) -> float:
    """``tr(T^dagger rho T)``."""
    return float(np.real(np.trace(T.conj().T @ rho @ T)))


def conditional_word_probability(m: QuantumMachine, word, inputs=None, start=None) -> float:
    """Probability of the observed word from a given start (the machine's ``<psi0|`` by default).

    ``start`` may be a state vector or a density matrix.
    """
    return probability_from(_start_density(m, start), word_operator(m, word, inputs))


def fixed_point_residual(m: QuantumMachine, rho: np.ndarray) -> float:
    """Largest deviation of ``sum_y P(y) U^dagger rho U P(y)`` from ``rho`` over all inputs."""
    worst = 0.0
    keys = [None] if m.kind == "QR" else list(m.inputs)
    for x in keys:
        U = m.unitary(x)
        image = sum(P @ U.conj().T @ rho @ U @ P for P in (m.projector(y) for y in m.alphabet))
        worst = max(worst, float(np.max(np.abs(image - rho))))
    return worst


def stationary_state(m: QuantumMachine, tol: float = matcore.DEFAULT_TOL) -> np.ndarray:
    """The maximally mixed state, checked against the measured-evolution fixed point."""
    rho = np.eye(m.n, dtype=complex) / m.n
    residual = fixed_point_residual(m, rho)
    if residual > tol:
        raise MachineError(f"maximally mixed state is not stationary (residual {residual:.3g})")
    return rho


def symbol_probability(m: QuantumMachine, y: str) -> float:
    """Asymptotic probability of a single symbol: projector rank over dimension."""
    if y not in m.projectors:
        raise MachineError(f"unknown symbol {y!r}")
    return len(m.projectors[y]) / m.n


def stationary_word_probability(m: QuantumMachine, word, inputs=None) -> float:
    """``tr(T^dagger(w) rho_s T(w))`` with ``rho_s`` the identity over n."""
    T = word_operator(m, word, inputs)
    return float(np.sum(np.abs(T) ** 2)) / m.n


def _transition_matrices(m: QuantumMachine):
    if m.kind == "QR":
        return {(ACCEPT, x): transition_operator(m, None, x) for x in m.inputs}
    return {(y, x): transition_operator(m, x, y) for x in m.inputs for y in m.outputs}


def is_deterministic(m: QuantumMachine, tol: float = matcore.ZERO_TOL) -> bool:
    return all(np.all(np.sum(np.abs(T) > tol, axis=1) <= 1) for T in _transition_matrices(m).values())


def is_complete(m: QuantumMachine) -> bool:
    """Every measurement is non-degenerate."""
    return all(len(idx) == 1 for idx in m.projectors.values())


def equivalent_sdg(m: QuantumMachine) -> StochasticMachine:
    """Classical generator with ``T'(y)_ij = |T(y)_ij|^2`` started from the uniform distribution."""
    if m.kind != "QG" or not is_deterministic(m):
        raise MachineError("the equivalent SDG is defined for deterministic quantum generators")
    mats = {y: np.abs(transition_operator(m, None, y)) ** 2 for y in m.outputs}
    return StochasticMachine.generator(
        m.states, mats, np.full(m.n, 1.0 / m.n), name=f"{m.name} (equivalent SDG)" if m.name else ""
    )


def recover_unitaries_and_projectors(transitions: Mapping[tuple[str, str], np.ndarray], tol: float = matcore.DEFAULT_TOL):
    """Rebuild ``U(x)`` and the projector index sets from transition matrices keyed by ``(y, x)``.

    ``U(x)`` is the sum over outputs and ``P(y) = U(x)^dagger T(y|x)``, which must agree
    for every input.
    """
    if not transitions:
        raise MachineError("no transition matrices given")
    inputs = list(dict.fromkeys(x for _, x in transitions))
    outputs = list(dict.fromkeys(y for y, _ in transitions))
    unitaries = {}
    projectors: dict[str, tuple[int, ...]] = {}
    for x in inputs:
        if any((y, x) not in transitions for y in outputs):
            raise MachineError(f"missing transition matrices for input {x!r}")
        U = sum(matcore.as_matrix(transitions[(y, x)]) for y in outputs)
        if not matcore.is_unitary(U, tol):
            raise MachineError(f"sum of T(y|{x}) over outputs is not unitary")
        unitaries[x] = U
        P_set = [U.conj().T @ matcore.as_matrix(transitions[(y, x)]) for y in outputs]
        if not matcore.is_projector_partition(P_set, tol):
            raise MachineError(f"reconstructed projectors for input {x!r} do not partition the basis")
        for y, P in zip(outputs, P_set):
            idx = tuple(int(i) for i in np.flatnonzero(np.abs(np.diag(P) - 1.0) <= tol))
            if projectors.setdefault(y, idx) != idx:
                raise MachineError(f"projector P({y}) differs between inputs")
    return unitaries, projectors


def reverse(m: QuantumMachine) -> QuantumMachine:
    """Machine built from the transposed unitaries; projectors are symmetric and stay put."""
    return QuantumMachine(
        m.kind,
        m.states,
        m.inputs,
        m.outputs,
        {x: U.T for x, U in m.unitaries.items()},
        m.projectors,
        m.start,
        f"{m.name} (reversed)" if m.name else "",
    )


@dataclass
class StructuralReport:
    strongly_connected: bool
    components: list[list[str]]
    incoming_labels_consistent: bool
    alphabet_bounded: bool
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations


def structural_checks(m: QuantumMachine) -> StructuralReport:
    """Graph-level properties every quantum transducer must have.

    (a) Every edge of the ``|U_ij|^2`` graph lies on a cycle, so each node joined to
    others sits in a strongly connected set. (b) All transitions into a state carry
    one output symbol. (c) The output alphabet is no larger than the dimension.
    """
    violations = []
    n = m.n
    A = np.zeros((n, n), dtype=bool)
    for U in m.unitaries.values():
        A |= matcore.unistochastic(U) > matcore.ZERO_TOL
    R = matcore.reachability(A)
    broken = [(i, j) for i in range(n) for j in range(n) if i != j and A[i, j] and not R[j, i]]
    for i, j in broken:
        violations.append(f"edge {m.states[i]}->{m.states[j]} has no return path")
    components = []
    seen: set[int] = set()
    for i in range(n):
        if i in seen:
            continue
        comp = [j for j in range(n) if j == i or (R[i, j] and R[j, i])]
        seen.update(comp)
        components.append([m.states[j] for j in comp])

    labels: dict[int, set[str]] = {j: set() for j in range(n)}
    for (y, x), T in _transition_matrices(m).items():
        label = x if m.kind == "QR" else y
        for j in np.flatnonzero(np.any(np.abs(T) > matcore.ZERO_TOL, axis=0)):
            labels[int(j)].add(label)
    mixed = [j for j, ys in labels.items() if len(ys) > 1]
    for j in mixed:
        violations.append(f"state {m.states[j]} entered on several symbols {sorted(labels[j])}")

    bounded = len(m.alphabet) <= n
    if not bounded:
        violations.append("output alphabet larger than the Hilbert space dimension")
    return StructuralReport(not broken, components, not mixed, bounded, violations)
