"""Reconstruction of the flag-marked ancilla-copy search scheme.

The scheme starts from the uniform index superposition with the marked
branch flagged, copies the index into every ancilla register on the flagged
branch only (Toffoli fan-out), and then runs further rounds that are
controlled by the flag. Rounds never touch the index register, so the
unflagged branch is frozen after preparation and carries no information
about the marked index.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, ValidationError
from .statevector import (
    QueryLedger,
    RegisterLayout,
    StateVector,
    apply_ccx,
    apply_controlled_block,
    apply_h,
    apply_oracle_flip,
    check_capacity,
    marginal_prob,
    new_basis,
    random_unitary,
    register_distribution,
    schmidt_rank,
)

ROUND_KINDS = ("copy", "identity", "hadamard", "random")
_H = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


@dataclass(frozen=True)
class RoundSpec:
    """One round after preparation.

    ``copy`` is the Toffoli fan-out; the others are flag-controlled blocks on
    ancilla qubits. ``targets`` restricts a block round to a subset of the
    ancillas (default: all of them).
    """

    kind: str
    seed: int | None = None
    targets: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in ROUND_KINDS:
            raise ValidationError(f"unknown round kind {self.kind!r}")
        if self.kind == "random" and self.seed is None:
            raise ValidationError("random round needs a seed")

    def check_layout(self, layout: RegisterLayout) -> None:
        if self.targets is None:
            return
        allowed = set(layout.ancilla_qubits)
        bad = [q for q in self.targets if q not in allowed]
        if bad:
            raise ValidationError(f"round targets {bad} are not ancilla qubits")
        if len(set(self.targets)) != len(self.targets):
            raise ValidationError(f"round targets repeat: {self.targets}")


def parse_rounds(text: str, seed: int) -> list[RoundSpec]:
    """Parse a comma list of ``identity``, ``hadamard``, ``random:<k>``.

    Random rounds get consecutive seeds derived from ``seed`` and their
    position, so one CLI seed fixes the whole sequence.
    """
    rounds: list[RoundSpec] = []
    text = text.strip()
    if not text:
        return rounds
    counter = 0
    for item in text.split(","):
        item = item.strip()
        m = re.fullmatch(r"random:(\d+)", item)
        if item in ("identity", "hadamard"):
            rounds.append(RoundSpec(item))
        elif m:
            for _ in range(int(m.group(1))):
                rounds.append(RoundSpec("random", seed=_round_seed(seed, counter)))
                counter += 1
        else:
            raise DomainError(f"bad round item {item!r}; use identity, hadamard or random:<k>")
    return rounds


def _round_seed(seed: int, position: int) -> int:
    return int(np.random.SeedSequence([seed, position]).generate_state(1)[0])


def prepare_marked_superposition(
    n: int, d: int, M: int
) -> tuple[StateVector, RegisterLayout, QueryLedger]:
    layout = RegisterLayout(n, M)
    if not 0 <= d < (1 << n):
        raise DomainError(f"marked index {d} out of range for n={n}")
    check_capacity(layout.total_qubits)
    state = new_basis(layout.total_qubits, 0)
    for k in layout.index:
        apply_h(state, k)
    ledger = QueryLedger()
    apply_oracle_flip(state, layout, d, ledger)
    return state, layout, ledger


def apply_copy_round(state: StateVector, layout: RegisterLayout) -> StateVector:
    layout.check_state(state)
    for reg in layout.ancillas:
        for k, w in zip(layout.index, reg):
            apply_ccx(state, layout.flag, k, w)
    return state


def apply_round(state: StateVector, layout: RegisterLayout, spec: RoundSpec) -> StateVector:
    layout.check_state(state)
    spec.check_layout(layout)
    if spec.kind == "copy":
        return apply_copy_round(state, layout)
    targets = spec.targets if spec.targets is not None else layout.ancilla_qubits
    if spec.kind == "identity" or not targets:
        return state
    flag = (layout.flag,)
    if spec.kind == "hadamard":
        for q in targets:
            apply_controlled_block(state, flag, (q,), _H)
        return state
    # random: one layer per target qubit, each a Haar block on up to two of them
    rng = np.random.default_rng(spec.seed)
    width = min(2, len(targets))
    for _ in range(len(targets)):
        picked = rng.choice(len(targets), size=width, replace=False)
        block = random_unitary(1 << width, rng)
        apply_controlled_block(state, flag, tuple(targets[i] for i in picked), block)
    return state


def run_pipeline(
    n: int, d: int, M: int, rounds: Sequence[RoundSpec] = ()
) -> tuple[StateVector, RegisterLayout, QueryLedger]:
    """Prepare, copy, then apply ``rounds`` in order."""
    state, layout, ledger = prepare_marked_superposition(n, d, M)
    apply_copy_round(state, layout)
    for spec in rounds:
        apply_round(state, layout, spec)
    return state, layout, ledger


def branch_amplitudes(state: StateVector, layout: RegisterLayout, flag_value: int) -> np.ndarray:
    """Copy of the amplitudes on the ``flag == flag_value`` subspace."""
    q = state.num_qubits
    axis = q - 1 - layout.flag
    return np.take(state.tensor(), flag_value, axis=axis).copy()


def ancilla_reveal_probability(state: StateVector, layout: RegisterLayout, d: int) -> float:
    """Probability that ancilla register 0 reads the marked index ``d``.

    For ``d == 0`` the copied pattern equals the blank one, so the value is 1
    and carries no information; see :func:`is_degenerate`.
    """
    if layout.M < 1:
        raise ValidationError("layout has no ancilla register")
    if not 0 <= d < (1 << layout.n):
        raise DomainError(f"marked index {d} out of range for n={layout.n}")
    return marginal_prob(state, layout.ancillas[0], d)


def is_degenerate(d: int) -> bool:
    return d == 0


def outcome_distribution(
    state: StateVector, layout: RegisterLayout, include_index: bool = True
) -> np.ndarray:
    if include_index:
        return state.probabilities()
    return register_distribution(state, (layout.flag,) + layout.ancilla_qubits)


def identification_probability(
    states: Iterable[StateVector], layout: RegisterLayout, include_index: bool = True
) -> float:
    """Average success of the maximum-likelihood guess of the marked index.

    ``states`` yields the pipeline output for ``d = 0, 1, ..., N-1`` in order;
    it may be a generator, only a running maximum is kept. The guesser sees a
    computational-basis measurement of flag and ancillas, plus the index
    register unless ``include_index`` is False. The value is
    ``(1/N) * sum_o max_d P(o | d)``.
    """
    N = 1 << layout.n
    best, count = None, 0
    for state in states:
        dist = outcome_distribution(state, layout, include_index)
        best = dist.copy() if best is None else np.maximum(best, dist, out=best)
        count += 1
    if count != N:
        raise DomainError(f"need one state per marked index ({N}), got {count}")
    return float(np.sum(best) / N)


def correlation_rank(state: StateVector, layout: RegisterLayout, tol: float = 1e-10) -> int:
    """Schmidt rank across (index + flag) | ancillas. Rank >= 2 means not a product."""
    return schmidt_rank(state, layout.index + (layout.flag,), tol)

