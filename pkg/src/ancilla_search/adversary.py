"""Randomized query algorithms with auxiliary qubits, checked against Grover's curve.

Each trial draws its own unitaries ``U_0 .. U_t`` over index plus extra
qubits and interleaves them with ``t`` phase-oracle queries. Success is the
probability of reading the marked index with any ancilla pattern, the most
generous reading of a valid answer.

The ceiling is the best success any ``t``-query algorithm can reach on
average over the marked index: ``sin^2((2t+1) theta)`` up to its first peak
and 1 afterwards (an algorithm may leave queries unused). Each trial also
reports the success of its fixed unitaries averaged over every marked index,
which is the quantity that ceiling provably bounds.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bound import overlap_success_probability
from .errors import DomainError
from .grover import closed_form_success, grover_angle
from .statevector import (
    QueryLedger,
    apply_controlled_block,
    apply_phase_oracle,
    check_capacity,
    new_basis,
    random_unitary,
)

CEILING_TOL = 1e-9


def optimal_success_ceiling(N: int, t: int) -> float:
    """Best average success after ``t`` queries on ``N`` items."""
    angle = (2 * t + 1) * grover_angle(N)
    if angle >= np.pi / 2:
        return 1.0
    return closed_form_success(N, t)


@dataclass(frozen=True)
class AdversaryConfig:
    n: int
    m_extra: int = 0
    t: int = 1
    trials: int = 500
    seed: int = 0
    block_qubits: int = 2
    depth: int | None = None  # defaults to 3 * (n + m_extra)

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")
        if self.m_extra < 0:
            raise DomainError(f"m_extra must be >= 0, got {self.m_extra}")
        if self.t < 0:
            raise DomainError(f"t must be >= 0, got {self.t}")
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials}")
        if not 1 <= self.block_qubits <= 6:
            raise DomainError(f"block_qubits must be in 1..6, got {self.block_qubits}")
        if self.depth is not None and self.depth < 1:
            raise DomainError(f"depth must be >= 1, got {self.depth}")
        check_capacity(self.n + self.m_extra)

    @property
    def num_qubits(self) -> int:
        return self.n + self.m_extra

    @property
    def layer_depth(self) -> int:
        return self.depth if self.depth is not None else 3 * self.num_qubits


@dataclass(frozen=True)
class TrialResult:
    trial: int
    d: int
    success: float
    mark_averaged: float
    queries: int


@dataclass(frozen=True)
class AdversaryReport:
    config: AdversaryConfig
    closed_form: float
    bound: float
    trials: tuple[TrialResult, ...] = field(repr=False)

    @property
    def max_success(self) -> float:
        return max(r.success for r in self.trials)

    @property
    def mean_success(self) -> float:
        return float(np.mean([r.success for r in self.trials]))

    @property
    def max_mark_averaged(self) -> float:
        return max(r.mark_averaged for r in self.trials)

    @property
    def violations(self) -> int:
        return sum(
            max(r.success, r.mark_averaged) > self.bound + CEILING_TOL for r in self.trials
        )

    @property
    def closed_form_exceedances(self) -> int:
        """Trials above ``sin^2((2t+1) theta)`` itself; legitimate past the peak."""
        return sum(r.success > self.closed_form + CEILING_TOL for r in self.trials)

    @property
    def queries_ok(self) -> bool:
        return all(r.queries == self.config.t for r in self.trials)


def _draw_layers(
    rng: np.random.Generator, num_qubits: int, width: int, depth: int, count: int
) -> list[list[tuple[tuple[int, ...], np.ndarray]]]:
    width = min(width, num_qubits)
    layers = []
    for _ in range(count):
        layer = []
        for _ in range(depth):
            qubits = tuple(int(q) for q in rng.choice(num_qubits, size=width, replace=False))
            layer.append((qubits, random_unitary(1 << width, rng)))
        layers.append(layer)
    return layers


def _simulate(config: AdversaryConfig, layers, d: int, ledger: QueryLedger) -> float:
    n = config.n
    register = tuple(range(n))
    state = new_basis(config.num_qubits, 0)
    for step, layer in enumerate(layers):
        if step:
            apply_phase_oracle(state, register, d, ledger)
        for qubits, block in layer:
            apply_controlled_block(state, (), qubits, block)
    return overlap_success_probability(state, n, d, range(1 << config.m_extra))


def run_trial(config: AdversaryConfig, trial: int) -> TrialResult:
    """One trial on its own substream derived from ``(seed, trial)``."""
    rng = np.random.default_rng([config.seed, trial])
    N = 1 << config.n
    d = int(rng.integers(N))
    layers = _draw_layers(
        rng, config.num_qubits, config.block_qubits, config.layer_depth, config.t + 1
    )
    ledger = QueryLedger()
    success = _simulate(config, layers, d, ledger)
    averaged = sum(_simulate(config, layers, mark, QueryLedger()) for mark in range(N)) / N
    return TrialResult(trial, d, success, averaged, ledger.queries)


def adversarial_search(config: AdversaryConfig) -> AdversaryReport:
    results = tuple(run_trial(config, i) for i in range(config.trials))
    N = 1 << config.n
    return AdversaryReport(
        config, closed_form_success(N, config.t), optimal_success_ceiling(N, config.t), results
    )


@dataclass(frozen=True)
class AdvantageComparison:
    n: int
    t: int
    closed_form: float
    bound: float
    without_ancillas: AdversaryReport
    with_ancillas: AdversaryReport

    @property
    def difference(self) -> float:
        return self.with_ancillas.max_success - self.without_ancillas.max_success

    @property
    def no_improvement(self) -> bool:
        return self.difference <= CEILING_TOL

    @property
    def within_ceiling(self) -> bool:
        return self.without_ancillas.violations == 0 and self.with_ancillas.violations == 0


def ancilla_advantage_report(
    n: int, t: int, trials: int, seed: int, m_extra: int = 2
) -> AdvantageComparison:
    """Same seeds, with and without ``m_extra`` extra qubits."""
    plain = adversarial_search(AdversaryConfig(n, 0, t, trials, seed))
    extra = adversarial_search(AdversaryConfig(n, m_extra, t, trials, seed))
    return AdvantageComparison(n, t, plain.closed_form, plain.bound, plain, extra)
