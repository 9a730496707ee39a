"""Independent reference computations used as test oracles."""

import itertools
import sys

import numpy as np
import pytest

from finitary import machines


def path_sum_probability(initial, mats, word):
    """Sum over every state path of start weight times edge weights; no matrix products."""
    n = len(initial)
    total = 0.0
    for path in itertools.product(range(n), repeat=len(word) + 1):
        p = initial[path[0]]
        for t, s in enumerate(word):
            p *= mats[s][path[t], path[t + 1]]
            if p == 0.0:
                break
        total += p
    return total


def branch_probabilities(unitaries, projectors, start, steps, n_measured):
    """Pure-state simulation summing over measurement branches.

    ``steps`` is a list of ``(unitary key, measured)``; each measurement branches
    on every outcome with its Born probability and renormalizes the state vector.
    Returns a dict from observed word to probability; impossible words are absent.
    """
    out = {}

    def run(psi, pos, word, prob):
        if len(word) == n_measured:
            out[word] = out.get(word, 0.0) + prob
            return
        x, measured = steps[pos]
        psi = psi @ unitaries[x]
        if not measured:
            run(psi, pos + 1, word, prob)
            return
        for y, idx in projectors.items():
            amp = np.zeros_like(psi)
            amp[list(idx)] = psi[list(idx)]
            p = float(np.vdot(amp, amp).real)
            if p > 0:
                run(amp / np.sqrt(p), pos + 1, word + y, prob * p)

    run(np.asarray(start, dtype=complex), 0, "", 1.0)
    return out


def mixed_branch_probabilities(unitaries, projectors, n, steps, n_measured):
    """Branch oracle from the maximally mixed state: average over basis-state starts."""
    total = {}
    for i in range(n):
        e = np.zeros(n, dtype=complex)
        e[i] = 1.0
        for w, p in branch_probabilities(unitaries, projectors, e, steps, n_measured).items():
            total[w] = total.get(w, 0.0) + p / n
    return total


def random_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def golden_mean_sdr():
    return machines.golden_mean_sdr().machine


@pytest.fixture
def golden_mean_sdg():
    return machines.golden_mean_sdg().machine


@pytest.fixture
def even_sdg():
    return machines.even_sdg().machine


@pytest.fixture
def sns():
    return machines.sns_sg().machine


@pytest.fixture
def golden_mean_qdg():
    return machines.golden_mean_qdg().machine


@pytest.fixture
def even_qdg():
    return machines.even_qdg().machine


@pytest.fixture
def beam_splitter():
    return machines.beam_splitter_qdg().machine


@pytest.fixture
def trapped_ion():
    return machines.trapped_ion_qt().machine


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance.summary_lines():
        terminalreporter.write_line(line)
