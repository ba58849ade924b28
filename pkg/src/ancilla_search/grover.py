"""Single-target Grover search with closed-form reference curves."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .statevector import (
    QueryLedger,
    RegisterLayout,
    StateVector,
    apply_h,
    apply_oracle_flip,
    apply_phase_on_pattern,
    apply_phase_oracle,
    apply_z,
    check_capacity,
    marginal_prob,
    new_basis,
    uniform_superposition,
)

TIE_TOL = 1e-12


@dataclass(frozen=True)
class SearchOutcome:
    n: int
    d: int
    t: int
    success_probability: float
    queries: int


def _check_database_size(N: int) -> int:
    if not isinstance(N, int) or N < 2 or N & (N - 1):
        raise DomainError(f"database size must be a power of two >= 2, got {N!r}")
    return N.bit_length() - 1


def grover_angle(N: int) -> float:
    """Rotation angle ``arcsin(1/sqrt(N))`` of one Grover iteration (half of it)."""
    _check_database_size(N)
    return math.asin(1.0 / math.sqrt(N))


def closed_form_success(N: int, t: int) -> float:
    if t < 0:
        raise DomainError(f"iteration count must be >= 0, got {t}")
    theta = grover_angle(N)
    return math.sin((2 * t + 1) * theta) ** 2


def optimal_iterations(N: int) -> int:
    """Iteration count maximizing the closed-form success; ties go to the smaller count.

    The maximum is taken over the first rise of the curve, ``0 <= t <=
    ceil(pi/4 * sqrt(N))``; later revivals of the periodic curve are ignored.
    Both integers around ``pi/(4 theta) - 1/2`` are evaluated instead of
    trusting a rounding rule, which misbehaves for small N.
    """
    theta = grover_angle(N)
    x = math.pi / (4 * theta) - 0.5
    best_t, best_p = None, -1.0
    for t in sorted({max(0, math.floor(x)), max(0, math.ceil(x))}):
        p = closed_form_success(N, t)
        if p > best_p + TIE_TOL:
            best_t, best_p = t, p
    return best_t


def apply_diffusion(state: StateVector, register) -> StateVector:
    """H^n, phase flip on |0..0>, H^n over ``register``."""
    for k in register:
        apply_h(state, k)
    apply_phase_on_pattern(state, register, 0)
    for k in register:
        apply_h(state, k)
    return state


def _check_search_args(n: int, d: int, t: int) -> None:
    if n < 1:
        raise DomainError(f"index width must be >= 1, got {n}")
    if not 0 <= d < (1 << n):
        raise DomainError(f"marked index {d} out of range for n={n}")
    if t < 0:
        raise DomainError(f"iteration count must be >= 0, got {t}")


def success_curve(n: int, d: int, t_max: int, oracle: str = "phase") -> list[SearchOutcome]:
    """Simulate ``t_max`` iterations once, recording the outcome after each.

    ``oracle="phase"`` uses the direct phase kernel (one query per iteration).
    ``oracle="flip"`` adds a flag qubit and realizes the phase as
    flip, Z on the flag, flip; that costs two bit-flip queries per iteration.
    """
    _check_search_args(n, d, t_max)
    if oracle not in ("phase", "flip"):
        raise DomainError(f"oracle must be 'phase' or 'flip', got {oracle!r}")
    register = tuple(range(n))
    ledger = QueryLedger()
    if oracle == "phase":
        check_capacity(n)
        state = uniform_superposition(n)
        layout = None
    else:
        layout = RegisterLayout(n, 0)
        state = new_basis(layout.total_qubits, 0)
        for k in register:
            apply_h(state, k)

    def outcome(t: int) -> SearchOutcome:
        if oracle == "phase":
            p = float(abs(state.amplitudes[d]) ** 2)
        else:
            p = marginal_prob(state, register, d)
        return SearchOutcome(n, d, t, min(max(p, 0.0), 1.0), ledger.queries)

    curve = [outcome(0)]
    for t in range(1, t_max + 1):
        if oracle == "phase":
            apply_phase_oracle(state, register, d, ledger)
        else:
            apply_oracle_flip(state, layout, d, ledger)
            apply_z(state, layout.flag)
            apply_oracle_flip(state, layout, d, ledger)
        apply_diffusion(state, register)
        curve.append(outcome(t))
    return curve


def run_grover(n: int, d: int, t: int, oracle: str = "phase") -> SearchOutcome:
    return success_curve(n, d, t, oracle)[-1]
