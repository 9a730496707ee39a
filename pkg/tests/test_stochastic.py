import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finitary import stochastic as sto
from finitary.exceptions import DimensionError, MachineError, RecurrenceError, UnknownSymbolError
from finitary.machines import EXAMPLES
from finitary.stochastic import StateClass, StochasticMachine

from conftest import path_sum_probability

STOCHASTIC = [name for name, f in EXAMPLES.items() if isinstance(f().machine, StochasticMachine)]


def words(alphabet, L):
    return ["".join(w) for w in itertools.product(alphabet, repeat=L)]


def mats_by_symbol(m):
    return {s: m.matrix(s) for s in m.alphabet}


# -- construction ---------------------------------------------------------------------


def test_generator_and_recognizer_shapes(golden_mean_sdr, golden_mean_sdg):
    assert golden_mean_sdr.kind == "SR" and golden_mean_sdr.outputs == ("accept",)
    assert golden_mean_sdg.kind == "SG" and golden_mean_sdg.inputs == ("clock",)
    assert golden_mean_sdr.alphabet == ("0", "1")


def test_matrices_are_frozen(golden_mean_sdg):
    with pytest.raises(ValueError):
        golden_mean_sdg.matrix("0")[0, 0] = 1.0


def test_rejects_non_substochastic():
    with pytest.raises(MachineError):
        StochasticMachine.generator(("A",), {"0": [[1.5]], "1": [[-0.5]]}, [1])


def test_rejects_non_stochastic_sum():
    with pytest.raises(MachineError):
        StochasticMachine.generator(("A",), {"0": [[0.3]], "1": [[0.3]]}, [1])


def test_recognizer_matrices_sum_to_stochastic():
    with pytest.raises(MachineError):
        StochasticMachine.recognizer(("A",), {"0": [[1.0]], "1": [[1.0]]}, [1])


def test_rejects_bad_initial():
    with pytest.raises(MachineError):
        StochasticMachine.generator(("A", "B"), {"0": np.eye(2)}, [0.5, 0.6])
    with pytest.raises(MachineError):
        StochasticMachine.generator(("A", "B"), {"0": np.eye(2)}, [1.5, -0.5])
    with pytest.raises(DimensionError):
        StochasticMachine.generator(("A", "B"), {"0": np.eye(2)}, [1])


def test_rejects_wrong_dimensions():
    with pytest.raises(DimensionError):
        StochasticMachine.generator(("A", "B"), {"0": np.eye(3)}, [1, 0])


def test_kind_constraints():
    with pytest.raises(MachineError):
        StochasticMachine("SG", ("A",), ("a", "b"), ("0",), {("0", "a"): [[1]], ("0", "b"): [[1]]}, [1])
    with pytest.raises(MachineError):
        StochasticMachine("SR", ("A",), ("a",), ("0", "1"), {("0", "a"): [[1]]}, [1])
    with pytest.raises(MachineError):
        StochasticMachine("XX", ("A",), ("a",), ("0",), {("0", "a"): [[1]]}, [1])


def test_transducer_per_input_stochastic():
    m = StochasticMachine(
        "ST",
        ("A", "B"),
        ("a", "b"),
        ("0", "1"),
        {("0", "a"): [[1, 0], [0, 0]], ("1", "a"): [[0, 0], [0, 1]], ("1", "b"): [[0, 1], [1, 0]]},
        [1, 0],
    )
    assert sto.word_probability(m, "01", inputs="ab") == pytest.approx(1.0)
    assert sto.word_probability(m, "00", inputs="ab") == 0.0
    with pytest.raises(MachineError):
        sto.word_probability(m, "01")


# -- state-to-state matrix ------------------------------------------------------------


def test_state_to_state_matrix(golden_mean_sdg, even_sdg):
    expected = np.array([[0.5, 0.5], [1, 0]])
    assert np.allclose(sto.state_to_state_matrix(golden_mean_sdg), expected)
    assert np.allclose(sto.state_to_state_matrix(even_sdg), expected)


def test_state_to_state_single_matrix():
    T = np.array([[0.2, 0.8], [0.6, 0.4]])
    m = StochasticMachine.generator(("A", "B"), {"0": T}, [1, 0])
    assert np.allclose(sto.state_to_state_matrix(m), T)


def test_recognizer_state_to_state_is_stochastic(golden_mean_sdr):
    T = sto.state_to_state_matrix(golden_mean_sdr)
    assert np.allclose(T.sum(axis=1), 1.0)


# -- word probabilities ---------------------------------------------------------------


@pytest.mark.parametrize(
    "word, p",
    [("0", 1 / 3), ("1", 2 / 3), ("011", 1 / 6), ("101", 1 / 3), ("000", 0.0), ("001", 0.0), ("100", 0.0), ("", 1.0)],
)
def test_golden_mean_sdr_words(golden_mean_sdr, word, p):
    assert sto.word_probability(golden_mean_sdr, word) == pytest.approx(p, abs=1e-12)


def test_golden_mean_sdr_length_three_support(golden_mean_sdr):
    # every allowed L=3 word other than 101 has probability 1/6
    probs = {w: sto.word_probability(golden_mean_sdr, w) for w in words("01", 3)}
    allowed = {w: p for w, p in probs.items() if p > 0}
    assert allowed.pop("101") == pytest.approx(1 / 3)
    assert all(p == pytest.approx(1 / 6) for p in allowed.values())


def test_even_word_from_stationary(even_sdg):
    assert sto.word_probability(even_sdg, "0", start=[2 / 3, 1 / 3]) == pytest.approx(1 / 3)


def test_word_probability_rejects_unknown_symbol(golden_mean_sdr):
    with pytest.raises(UnknownSymbolError):
        sto.word_probability(golden_mean_sdr, "012")


@pytest.mark.parametrize("name", STOCHASTIC)
def test_matrix_product_matches_path_sum(name):
    m = EXAMPLES[name]().machine
    mats = mats_by_symbol(m)
    for L in range(0, 6):
        for w in words(m.alphabet, L):
            assert sto.word_probability(m, w) == pytest.approx(path_sum_probability(m.initial, mats, w), abs=1e-14)


@pytest.mark.parametrize("name", STOCHASTIC)
def test_normalized_at_every_length(name):
    m = EXAMPLES[name]().machine
    for L in range(1, 11):
        total = np.sum([sto.word_probability(m, w) for w in words(m.alphabet, L)])
        assert abs(total - 1.0) <= 1e-9


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 4), k=st.integers(1, 3), seed=st.integers(0, 2**32 - 1), L=st.integers(0, 4))
def test_random_generators_match_path_sum(n, k, seed, L):
    rng = np.random.default_rng(seed)
    raw = rng.uniform(0, 1, size=(k, n, n)) * (rng.uniform(size=(k, n, n)) < 0.7)
    raw[0] += 1e-3
    raw /= raw.sum(axis=(0, 2))[None, :, None]
    pi = rng.dirichlet(np.ones(n))
    symbols = "abc"[:k]
    m = StochasticMachine.generator(tuple(f"s{i}" for i in range(n)), dict(zip(symbols, raw)), pi)
    total = 0.0
    for w in words(symbols, L):
        p = sto.word_probability(m, w)
        assert p == pytest.approx(path_sum_probability(pi, dict(zip(symbols, raw)), w), abs=1e-13)
        total += p
    assert total == pytest.approx(1.0, abs=1e-9)


# -- deterministic path formula --------------------------------------------------------


def test_deterministic_path_examples(golden_mean_sdr):
    assert sto.word_probability_deterministic(golden_mean_sdr, "011", "s0") == pytest.approx(1 / 6)
    assert sto.word_probability_deterministic(golden_mean_sdr, "", "s0") == 1.0
    assert sto.word_probability_deterministic(golden_mean_sdr, "00", "s0") == 0.0


def test_deterministic_path_rejects_nondeterministic(sns):
    with pytest.raises(MachineError):
        sto.word_probability_deterministic(sns, "01", "A")


@pytest.mark.parametrize("name", STOCHASTIC)
def test_path_formula_equals_matrix_formula(name):
    m = EXAMPLES[name]().machine
    if not sto.is_deterministic(m):
        pytest.skip("nondeterministic")
    for s in m.states:
        for L in range(0, 9):
            for w in words(m.alphabet, L):
                a = sto.word_probability_deterministic(m, w, s)
                b = sto.word_probability(m, w, start=s)
                assert abs(a - b) <= 1e-12


# -- conditionals ----------------------------------------------------------------------


def test_golden_mean_conditionals(golden_mean_sdr):
    assert sto.conditional_probability(golden_mean_sdr, "0", "1") == pytest.approx(1.0)
    assert sto.conditional_probability(golden_mean_sdr, "0", "0") == 0.0


def test_conditional_after_impossible_word_is_zero(golden_mean_sdr):
    assert sto.conditional_probability(golden_mean_sdr, "00", "1") == 0.0


def test_sns_conditional(sns):
    assert sto.conditional_probability(sns, "01", "0") == pytest.approx(1 / 4, abs=1e-12)


@pytest.mark.parametrize("k", range(1, 13))
def test_sns_conditional_closed_form(sns, k):
    # derived by hand from the two-state products: P(0 | 0 1^k) = k / (2 (k + 1))
    assert sto.conditional_probability(sns, "0" + "1" * k, "0") == pytest.approx(k / (2 * (k + 1)), abs=1e-12)


def test_sns_conditionals_pairwise_distinct(sns):
    values = [sto.conditional_probability(sns, "0" + "1" * k, "0") for k in range(1, 13)]
    gaps = [abs(a - b) for a, b in itertools.combinations(values, 2)]
    assert min(gaps) >= 1e-6


# -- determinism and structure -----------------------------------------------------------


def test_determinism_flags(golden_mean_sdr, sns):
    assert sto.is_deterministic(golden_mean_sdr)
    assert not sto.is_deterministic(sns)


def test_all_zero_matrices_are_deterministic():
    m = StochasticMachine("SG", ("A",), ("c",), ("0", "1"), {("0", "c"): [[1.0]]}, [1])
    assert np.all(m.matrix("1") == 0)
    assert sto.is_deterministic(m)


def test_golden_mean_sdr_state_classes(golden_mean_sdr):
    classes = sto.classify_states(golden_mean_sdr)
    assert classes == {
        "s0": StateClass.TRANSIENT,
        "s1": StateClass.ASYMPTOTICALLY_RECURRENT,
        "s2": StateClass.ASYMPTOTICALLY_RECURRENT,
    }


def test_strongly_connected_all_recurrent(golden_mean_sdg):
    assert set(sto.classify_states(golden_mean_sdg).values()) == {StateClass.ASYMPTOTICALLY_RECURRENT}


def _two_cycles():
    # start s -> a cycle {a, b} or a self-loop c
    T0 = np.zeros((4, 4))
    T0[0, 1] = 0.5
    T0[1, 2] = 1.0
    T0[2, 1] = 1.0
    T1 = np.zeros((4, 4))
    T1[0, 3] = 0.5
    T1[3, 3] = 1.0
    return StochasticMachine.generator(("s", "a", "b", "c"), {"0": T0, "1": T1}, [1, 0, 0, 0])


def test_two_disjoint_cycles():
    m = _two_cycles()
    classes = sto.classify_states(m)
    assert classes["s"] == StateClass.TRANSIENT
    assert {classes[s] for s in "abc"} == {StateClass.ASYMPTOTICALLY_RECURRENT}
    assert sto.recurrent_classes(m) == [["a", "b"], ["c"]]
    with pytest.raises(RecurrenceError, match="a"):
        sto.restrict_to_recurrent(m)


def test_transient_recurrent_state():
    # s has a self-loop but can leave for an absorbing state
    T = np.array([[0.5, 0.5], [0, 1]])
    m = StochasticMachine.generator(("s", "t"), {"0": T}, [1, 0])
    assert sto.classify_states(m) == {"s": StateClass.TRANSIENT_RECURRENT, "t": StateClass.ASYMPTOTICALLY_RECURRENT}


def test_restrict_golden_mean_sdr(golden_mean_sdr, golden_mean_sdg):
    r = sto.restrict_to_recurrent(golden_mean_sdr)
    assert r.states == ("s1", "s2")
    assert np.allclose(r.initial, [2 / 3, 1 / 3], atol=1e-9)
    for s in "01":
        assert np.allclose(r.matrix(s), golden_mean_sdg.matrix(s))


def test_restrict_recurrent_machine_keeps_matrices(golden_mean_sdg):
    r = sto.restrict_to_recurrent(golden_mean_sdg)
    assert r.states == golden_mean_sdg.states
    assert np.allclose(r.initial, [2 / 3, 1 / 3], atol=1e-9)


def test_transient_start_matches_recurrent_restriction(golden_mean_sdr):
    r = sto.restrict_to_recurrent(golden_mean_sdr)
    for L in range(0, 9):
        for w in words("01", L):
            assert abs(sto.word_probability(golden_mean_sdr, w) - sto.word_probability(r, w)) <= 1e-12
