"""Success-probability accounting for searches that carry auxiliary qubits.

States live on ``n + m`` qubits: the index register is qubits ``0..n-1`` and
the ancillas are ``n..n+m-1``, so ``|tau> (x) |w>`` is basis index
``tau + 2**n * w``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DomainError
from .statevector import StateVector, apply_h

DEFAULT_UNIFORMITY_EPS = 0.05


@dataclass(frozen=True)
class AncillaAnalysis:
    n: int
    m: int
    tau: int
    omega: tuple[int, ...]
    overlaps: tuple[float, ...]  # |<psi|tau, w>|^2 per pattern in omega
    pr_success: float
    bound_rhs: float
    p: float  # max overlap^2 == 2**-p
    uniform: bool


def _check_args(psi: StateVector, n: int, tau: int, omega: Iterable[int]) -> tuple[int, tuple[int, ...]]:
    if not 0 <= n <= psi.num_qubits:
        raise DomainError(f"index width {n} does not fit a {psi.num_qubits}-qubit state")
    m = psi.num_qubits - n
    if not 0 <= tau < (1 << n):
        raise DomainError(f"target {tau} out of range for n={n}")
    omega = tuple(omega)
    if len(set(omega)) != len(omega):
        raise DomainError("ancilla patterns in omega must be distinct")
    for w in omega:
        if not 0 <= w < (1 << m):
            raise DomainError(f"ancilla pattern {w} out of range for m={m}")
    return m, omega


def pattern_overlaps(psi: StateVector, n: int, tau: int, omega: Iterable[int]) -> np.ndarray:
    """``|<psi|(|tau> (x) |w>)|^2`` for each ``w`` in ``omega``."""
    _, omega = _check_args(psi, n, tau, omega)
    idx = np.array([tau + (w << n) for w in omega], dtype=np.int64)
    return np.abs(psi.amplitudes[idx]) ** 2


def overlap_success_probability(psi: StateVector, n: int, tau: int, omega: Iterable[int]) -> float:
    """Probability of reading ``tau`` with the ancillas in one of ``omega``."""
    p = float(np.sum(pattern_overlaps(psi, n, tau, omega)))
    return min(max(p, 0.0), 1.0)


def uniform_overlap_bound(
    psi: StateVector,
    n: int,
    tau: int,
    omega: Iterable[int],
    uniformity_eps: float = DEFAULT_UNIFORMITY_EPS,
) -> tuple[float, float, bool]:
    """Return ``(pr, 2**m * term, uniform)``.

    ``term`` is the mean overlap over ``omega``, so ``pr == |omega| * term``.
    The overlaps count as uniform when ``max/min <= 1 + uniformity_eps``; a zero
    overlap is never uniform.
    """
    a = analyze(psi, n, tau, omega, uniformity_eps)
    return a.pr_success, a.bound_rhs, a.uniform


def analyze(
    psi: StateVector,
    n: int,
    tau: int,
    omega: Iterable[int],
    uniformity_eps: float = DEFAULT_UNIFORMITY_EPS,
) -> AncillaAnalysis:
    m, omega = _check_args(psi, n, tau, omega)
    ov = pattern_overlaps(psi, n, tau, omega)
    pr = min(max(float(ov.sum()), 0.0), 1.0)
    if len(ov):
        term = float(ov.mean())
        lo, hi = float(ov.min()), float(ov.max())
        uniform = lo > 0.0 and hi / lo <= 1.0 + uniformity_eps
        p = -math.log2(hi) if hi > 0.0 else math.inf
    else:
        term, uniform, p = 0.0, False, math.inf
    return AncillaAnalysis(
        n=n,
        m=m,
        tau=tau,
        omega=omega,
        overlaps=tuple(float(x) for x in ov),
        pr_success=pr,
        bound_rhs=(1 << m) * term,
        p=p,
        uniform=uniform,
    )


def query_count_real(n: int, m: int, p: float) -> float:
    """``arcsin(sqrt(2**-p)) * sqrt(2**(n+m))`` before rounding."""
    if n < 0 or m < 0:
        raise DomainError(f"register widths must be >= 0, got n={n}, m={m}")
    if not 0 <= p <= n + m:
        raise DomainError(f"p={p} outside [0, n+m={n + m}]")
    return math.asin(math.sqrt(2.0**-p)) * math.sqrt(2.0 ** (n + m))


def query_count_estimate(n: int, m: int, p: float) -> int:
    return math.ceil(query_count_real(n, m, p))


def hadamard_average(psi: StateVector, ancilla: Iterable[int]) -> StateVector:
    for k in ancilla:
        apply_h(psi, k)
    return psi
