"""Word distributions and the process-language axioms.

A process language assigns each length-L word a probability, normalized at every
length, with a support closed under taking subwords and probabilities that never
grow when a word is extended. This module enumerates those distributions from
machines and checks the axioms on them.
"""

from __future__ import annotations

import itertools
import math
import os
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from . import matcore
from ._words import join_word, split_word
from .exceptions import EnumerationLimitError, MachineError
from .quantum import QuantumMachine
from .stochastic import StochasticMachine

DEFAULT_MAX_WORDS = 2**20
MAX_WORDS_ENV = "PROCLANG_MAX_WORDS"


def max_words() -> int:
    raw = os.environ.get(MAX_WORDS_ENV)
    if raw is None:
        return DEFAULT_MAX_WORDS
    try:
        return int(raw)
    except ValueError:
        raise EnumerationLimitError(f"{MAX_WORDS_ENV}={raw!r} is not an integer") from None


@dataclass
class WordDistribution:
    alphabet: tuple[str, ...]
    length: int
    probs: dict[str, float]

    def __post_init__(self):
        self.alphabet = tuple(self.alphabet)

    def __getitem__(self, word) -> float:
        if not isinstance(word, str):
            word = join_word(word)
        return self.probs.get(word, 0.0)

    def total(self) -> float:
        return math.fsum(self.probs.values())

    def support(self, tol: float = matcore.ZERO_TOL) -> set[str]:
        return {w for w, p in self.probs.items() if p > tol}

    def is_normalized(self, tol: float = matcore.DEFAULT_TOL) -> bool:
        return abs(self.total() - 1.0) <= tol and all(-tol <= p <= 1 + tol for p in self.probs.values())

    def marginal(self, positions: Sequence[int]) -> WordDistribution:
        """Distribution of the symbols at ``positions``, summing out the rest."""
        out: dict[str, float] = {}
        for w, p in self.probs.items():
            symbols = split_word(w, self.alphabet)
            key = join_word([symbols[i] for i in positions])
            out[key] = out.get(key, 0.0) + p
        for symbols in itertools.product(self.alphabet, repeat=len(positions)):
            out.setdefault(join_word(symbols), 0.0)
        return WordDistribution(self.alphabet, len(positions), out)

    def to_dict(self) -> dict:
        return {"alphabet": list(self.alphabet), "L": self.length, "probs": dict(self.probs)}

    @classmethod
    def from_dict(cls, data: dict) -> WordDistribution:
        try:
            alphabet = [str(a) for a in data["alphabet"]]
            length = int(data["L"])
            probs = {str(w): float(p) for w, p in data["probs"].items()}
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise MachineError(f"malformed distribution: {exc}") from None
        for w in probs:
            if len(split_word(w, alphabet)) != length:
                raise MachineError(f"word {w!r} does not have length {length}")
        return cls(tuple(alphabet), length, probs)


# -- enumeration ---------------------------------------------------------------------

# A walker describes a machine as: an initial state, a function extending the state by
# one observed symbol, and a function scoring a state's probability.
Walker = tuple[object, Callable[[object, str, int], object], Callable[[object], float]]


def _walk(alphabet: Sequence[str], L: int, walker: Walker, prune: bool) -> dict[str, float]:
    init, extend, score = walker
    probs: dict[str, float] = {}

    def visit(prefix: list[str], state, depth: int):
        if depth == L:
            probs[join_word(prefix)] = score(state)
            return
        for s in alphabet:
            nxt = extend(state, s, depth)
            if prune and score(nxt) == 0.0:
                for tail in itertools.product(alphabet, repeat=L - depth - 1):
                    probs[join_word(prefix + [s, *tail])] = 0.0
                continue
            visit(prefix + [s], nxt, depth + 1)

    visit([], init, 0)
    return probs


def _stochastic_walker(m: StochasticMachine, start, inputs) -> Walker:
    xs = None if inputs is None else split_word(inputs, m.inputs)

    def extend(pi, s, depth):
        x = None if xs is None else xs[depth]
        return pi @ m.matrix(s, x)

    return m.distribution(start), extend, lambda pi: float(pi.sum())


def quantum_walker(m: QuantumMachine, steps: Sequence[tuple[str | None, bool]], start=None) -> Walker:
    """Walker over a schedule of ``(input, measured)`` steps.

    Unmeasured steps apply ``U(x)`` only; the k-th observed symbol is applied at the
    k-th measured step. ``start=None`` uses the stationary mixed state, otherwise a
    state vector (or ``"start"`` for the machine's own) or a density matrix.
    """
    n = m.n
    if start is None:
        rho = None
    elif isinstance(start, str):
        if start != "start":
            raise MachineError(f"unknown start specification {start!r}")
        rho = np.outer(m.start.conj(), m.start)
    else:
        start = np.asarray(start, dtype=complex)
        rho = start if start.ndim == 2 else np.outer(start.conj(), start)

    measured_at = [i for i, (_, meas) in enumerate(steps) if meas]
    U = {x: m.unitary(x) for x, _ in steps}

    def extend(state, y, depth):
        T, pos = state
        stop = measured_at[depth]
        for x, _ in steps[pos:stop]:
            T = T @ U[x]
        T = T @ U[steps[stop][0]] @ m.projector(y)
        return T, stop + 1

    def score(state):
        T, _ = state
        if rho is None:
            return float(np.sum(np.abs(T) ** 2)) / n
        return float(np.real(np.trace(T.conj().T @ rho @ T)))

    return (np.eye(n, dtype=complex), 0), extend, score


def enumerate_distribution(
    machine: StochasticMachine | QuantumMachine,
    L: int,
    protocol=None,
    *,
    start=None,
    inputs=None,
    prune: bool = True,
    limit: int | None = None,
) -> WordDistribution:
    """Probabilities of every observed word of length ``L``.

    Stochastic machines start from their initial distribution unless ``start`` says
    otherwise; transducers need ``inputs``. Quantum machines start from the stationary
    mixed state and follow ``protocol`` (default: measure after every step, cycling
    through the inputs in order). Prefixes of probability exactly zero are pruned.
    """
    if L < 0:
        raise ValueError("word length must be non-negative")
    alphabet = machine.alphabet
    limit = max_words() if limit is None else limit
    if len(alphabet) ** L > limit:
        raise EnumerationLimitError(f"{len(alphabet)}^{L} words exceeds the cap of {limit}")
    if isinstance(machine, StochasticMachine):
        if protocol is not None:
            raise MachineError("measurement protocols apply to quantum machines only")
        walker = _stochastic_walker(machine, start, inputs)
    else:
        if machine.kind == "QR":
            steps = [(None, True)] * L
        else:
            from .protocols import MeasurementProtocol

            protocol = protocol or MeasurementProtocol.every_step(machine)
            steps = protocol.schedule(L)
        walker = quantum_walker(machine, steps, start)
    return WordDistribution(alphabet, L, _walk(alphabet, L, walker, prune))


def distributions(machine, Lmax: int, **kwargs) -> list[WordDistribution]:
    return [enumerate_distribution(machine, L, **kwargs) for L in range(1, Lmax + 1)]


# -- axioms ----------------------------------------------------------------------------


@dataclass
class ProcessLanguageReport:
    normalization: dict[int, float] = field(default_factory=dict)
    closure_violations: list[str] = field(default_factory=list)
    consistency_violations: list[str] = field(default_factory=list)
    normalization_violations: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.closure_violations or self.consistency_violations or self.normalization_violations)


def check_process_language(
    dists: Iterable[WordDistribution],
    tol: float = matcore.DEFAULT_TOL,
    zero_tol: float = matcore.ZERO_TOL,
) -> ProcessLanguageReport:
    """Check normalization, subword closure and consistency over consecutive lengths."""
    by_length = {d.length: d for d in dists}
    report = ProcessLanguageReport()
    for L, d in sorted(by_length.items()):
        report.normalization[L] = d.total()
        if not d.is_normalized(tol):
            report.normalization_violations.append(L)
        shorter = by_length.get(L - 1)
        if shorter is None or L < 2:
            continue
        allowed = shorter.support(zero_tol)
        for w in sorted(d.support(zero_tol)):
            symbols = split_word(w, d.alphabet)
            # prefix and suffix closure at every length covers all contiguous subwords
            for sub in (join_word(symbols[:-1]), join_word(symbols[1:])):
                if sub not in allowed:
                    report.closure_violations.append(f"{w} supported but subword {sub} is not")
        for w, p in d.probs.items():
            head = join_word(split_word(w, d.alphabet)[:-1])
            if p > shorter[head] + tol:
                report.consistency_violations.append(f"P({w})={p:.6g} > P({head})={shorter[head]:.6g}")
    return report


@dataclass
class ForbiddenWordReport:
    horizon: int
    irreducible: list[str]


def irreducible_forbidden_words(machine, Lmax: int, tol: float = matcore.ZERO_TOL, **kwargs) -> ForbiddenWordReport:
    """Zero-probability words up to ``Lmax`` all of whose proper subwords are allowed."""
    dists = {d.length: d for d in distributions(machine, Lmax, **kwargs)}
    allowed = {L: d.support(tol) for L, d in dists.items()}
    found = []
    for L in range(1, Lmax + 1):
        for w, p in dists[L].probs.items():
            if p > tol:
                continue
            symbols = split_word(w, machine.alphabet)
            if all(
                join_word(symbols[i : i + k]) in allowed[k] for k in range(1, L) for i in range(L - k + 1)
            ):
                found.append(w)
    found.sort(key=lambda w: (len(w), w))
    return ForbiddenWordReport(Lmax, found)


@dataclass
class AcceptanceResult:
    accepted: bool
    max_deviation: float
    worst_word: str | None
    support_violations: list[str]


def accepts_with_threshold(
    machine,
    reference: Iterable[WordDistribution],
    delta: float,
    tol: float = matcore.ZERO_TOL,
    **kwargs,
) -> AcceptanceResult:
    """Threshold recognition of a reference process language.

    Accept iff every supported reference word is matched to within ``delta`` and every
    unsupported one gets probability at most ``tol`` from the machine.
    """
    worst, worst_word = 0.0, None
    violations = []
    for ref in reference:
        if tuple(ref.alphabet) != tuple(machine.alphabet):
            raise MachineError(f"alphabets differ: {list(ref.alphabet)} vs {list(machine.alphabet)}")
        ours = enumerate_distribution(machine, ref.length, **kwargs)
        for w in ours.probs:
            p_ref, p = ref[w], ours[w]
            dev = abs(p_ref - p)
            if p_ref > tol:
                if dev > worst:
                    worst, worst_word = dev, w
            elif p > tol:
                violations.append(w)
                if dev > worst:
                    worst, worst_word = dev, w
    accepted = not violations and worst <= delta
    return AcceptanceResult(accepted, worst, worst_word, violations)


def plot_data(d: WordDistribution) -> list[tuple[float, float]]:
    """Map supported binary words to ``(0.w, log2 density)`` points, sorted by x."""
    if set(d.alphabet) != {"0", "1"}:
        raise MachineError("plot data needs the binary alphabet {0, 1}")
    points = []
    for w, p in d.probs.items():
        if p <= matcore.ZERO_TOL:
            continue
        x = math.fsum(int(s) * 2.0 ** -(t + 1) for t, s in enumerate(w))
        points.append((x, math.log2(p * 2.0**d.length)))
    points.sort()
    return points


def plot_tsv(points: Iterable[tuple[float, float]]) -> str:
    return "".join(f"{x!r}\t{y!r}\n" for x, y in points)
