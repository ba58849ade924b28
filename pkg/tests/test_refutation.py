import math

import numpy as np
import pytest

from ancilla_search import DomainError, RegisterLayout, ValidationError
from ancilla_search.refutation import (
    RoundSpec,
    ancilla_reveal_probability,
    apply_copy_round,
    apply_round,
    branch_amplitudes,
    correlation_rank,
    identification_probability,
    parse_rounds,
    prepare_marked_superposition,
    run_pipeline,
)

from oracles import identification_brute, post_copy_amplitudes

S2 = 1 / math.sqrt(2)


def test_layout_shape():
    layout = RegisterLayout(3, 2)
    assert layout.total_qubits == 3 + 1 + 2 * 3
    assert layout.index == (0, 1, 2) and layout.flag == 3
    assert layout.ancillas == ((4, 5, 6), (7, 8, 9))
    every = list(layout.index) + [layout.flag] + list(layout.ancilla_qubits)
    assert sorted(every) == list(range(layout.total_qubits))


def test_prepare_n1():
    state, layout, ledger = prepare_marked_superposition(1, 1, 1)
    expected = np.zeros(8)
    expected[0] = S2  # |x=0, flag=0, w=0>
    expected[1 | 2] = S2  # |x=1, flag=1, w=0>
    np.testing.assert_allclose(state.amplitudes, expected, atol=1e-12)
    assert ledger.queries == 1


def test_prepare_n2_d3():
    state, layout, ledger = prepare_marked_superposition(2, 3, 1)
    nz = {i: a for i, a in enumerate(state.amplitudes) if abs(a) > 1e-15}
    assert len(nz) == 4
    assert all(abs(a - 0.5) < 1e-12 for a in nz.values())
    flagged = [i for i in nz if (i >> layout.flag) & 1]
    assert flagged == [3 | 4]


@pytest.mark.parametrize("n, d, M", [(1, 0, 0), (2, 1, 2), (3, 5, 1)])
def test_prepare_uses_one_query(n, d, M):
    assert prepare_marked_superposition(n, d, M)[2].queries == 1


def test_prepare_errors(monkeypatch):
    with pytest.raises(DomainError):
        prepare_marked_superposition(2, 4, 1)
    monkeypatch.setenv("ANCILLA_SEARCH_MAX_QUBITS", "8")
    from ancilla_search import CapacityError

    with pytest.raises(CapacityError):
        prepare_marked_superposition(3, 1, 2)


def test_copy_round_n2_d3():
    state, layout, _ = prepare_marked_superposition(2, 3, 1)
    before = state.amplitudes.copy()
    apply_copy_round(state, layout)
    assert abs(state.amplitudes[3 | 4 | (3 << 3)] - 0.5) < 1e-12
    for i in range(3):
        assert state.amplitudes[i] == before[i]


def test_copy_round_d0_is_noop():
    state, layout, _ = prepare_marked_superposition(2, 0, 2)
    before = state.amplitudes.copy()
    apply_copy_round(state, layout)
    np.testing.assert_array_equal(state.amplitudes, before)


def test_copy_round_n1_m2():
    state, _, _ = run_pipeline(1, 1, 2)
    assert abs(state.amplitudes[0b1111] - S2) < 1e-12


@pytest.mark.parametrize("n", range(1, 5))
@pytest.mark.parametrize("M", range(0, 3))
def test_post_copy_matches_written_form(n, M):
    for d in range(1 << n):
        state, _, _ = run_pipeline(n, d, M)
        np.testing.assert_allclose(state.amplitudes, post_copy_amplitudes(n, d, M), atol=1e-12)


def test_identity_round_changes_nothing():
    state, layout, _ = run_pipeline(2, 2, 1)
    before = state.amplitudes.copy()
    apply_round(state, layout, RoundSpec("identity"))
    np.testing.assert_array_equal(state.amplitudes, before)


@pytest.mark.parametrize("spec", [RoundSpec("hadamard"), RoundSpec("random", seed=4), RoundSpec("copy")])
def test_rounds_leave_unflagged_branch_untouched(spec):
    state, layout, _ = run_pipeline(3, 5, 2)
    before = branch_amplitudes(state, layout, 0)
    apply_round(state, layout, spec)
    np.testing.assert_array_equal(branch_amplitudes(state, layout, 0), before)


def test_random_round_is_deterministic():
    a, layout, _ = run_pipeline(2, 1, 2)
    b = a.copy()
    apply_round(a, layout, RoundSpec("random", seed=99))
    apply_round(b, layout, RoundSpec("random", seed=99))
    np.testing.assert_array_equal(a.amplitudes, b.amplitudes)


def test_round_validation():
    state, layout, _ = run_pipeline(2, 1, 1)
    with pytest.raises(ValidationError):
        apply_round(state, layout, RoundSpec("hadamard", targets=(0,)))
    with pytest.raises(ValidationError):
        apply_round(state, layout, RoundSpec("random", seed=1, targets=(layout.flag,)))
    with pytest.raises(ValidationError):
        RoundSpec("random")
    with pytest.raises(ValidationError):
        RoundSpec("swap")
    # a subset of ancillas is fine
    apply_round(state, layout, RoundSpec("hadamard", targets=(layout.ancillas[0][1],)))


def test_parse_rounds():
    rounds = parse_rounds("identity, random:3,hadamard", seed=7)
    assert [r.kind for r in rounds] == ["identity", "random", "random", "random", "hadamard"]
    assert len({r.seed for r in rounds if r.kind == "random"}) == 3
    assert parse_rounds("identity, random:3,hadamard", seed=7) == rounds
    assert parse_rounds("", seed=1) == []
    with pytest.raises(DomainError):
        parse_rounds("random", seed=0)
    with pytest.raises(DomainError):
        parse_rounds("identity,,", seed=0)


def test_reveal_examples():
    state, layout, _ = run_pipeline(1, 1, 1)
    assert abs(ancilla_reveal_probability(state, layout, 1) - 0.5) < 1e-12
    state, layout, _ = run_pipeline(2, 0, 1, parse_rounds("identity", 0))
    assert abs(ancilla_reveal_probability(state, layout, 0) - 1.0) < 1e-12
    for seed in range(10):
        state, layout, _ = run_pipeline(2, 3, 1, parse_rounds("random:3", seed))
        assert ancilla_reveal_probability(state, layout, 3) <= 0.25 + 1e-12


def test_reveal_needs_ancilla():
    state, layout, _ = run_pipeline(2, 1, 0)
    with pytest.raises(ValidationError):
        ancilla_reveal_probability(state, layout, 1)


def _states(n, M, rounds):
    return [run_pipeline(n, d, M, rounds)[0] for d in range(1 << n)]


@pytest.mark.parametrize(
    "n, M, rounds, expected",
    [(1, 1, "identity", 1.0), (2, 1, "identity", 0.5)],
)
def test_identification_examples(n, M, rounds, expected):
    states = _states(n, M, parse_rounds(rounds, 0))
    assert abs(identification_probability(states, RegisterLayout(n, M)) - expected) < 1e-12


@pytest.mark.parametrize("seed", range(4))
def test_identification_matches_brute_force(seed):
    n, M = 3, 2
    layout = RegisterLayout(n, M)
    states = _states(n, M, parse_rounds("random:5", seed))
    amps = [list(s.amplitudes) for s in states]
    full = identification_probability(states, layout)
    assert abs(full - identification_brute(amps, n, range(layout.total_qubits))) < 1e-12
    assert full <= 2 / (1 << n) + 1e-12
    partial = identification_probability(states, layout, include_index=False)
    measured = (layout.flag,) + layout.ancilla_qubits
    assert abs(partial - identification_brute(amps, n, measured)) < 1e-12
    assert partial <= 2 / (1 << n) + 1e-12


def test_identification_needs_every_mark():
    states = _states(2, 1, [])
    with pytest.raises(DomainError):
        identification_probability(states[:3], RegisterLayout(2, 1))


@pytest.mark.parametrize("n, M", [(1, 1), (2, 1), (2, 2), (3, 1)])
def test_post_copy_state_is_entangled(n, M):
    for d in range(1, 1 << n):
        state, layout, _ = run_pipeline(n, d, M)
        assert correlation_rank(state, layout) >= 2
    state, layout, _ = run_pipeline(n, 0, M)
    assert correlation_rank(state, layout) == 1
