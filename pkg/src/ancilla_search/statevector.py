"""Dense state-vector substrate and in-place gate kernels.

Qubit ``k`` is bit ``k`` of the basis index (little-endian). Kernels work on a
``[2] * q`` tensor view of the amplitude buffer, where qubit ``k`` lives on
axis ``q - 1 - k``; no gate matrix is ever built for the elementary gates.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, DomainError, ValidationError

DEFAULT_MAX_QUBITS = 26
MAX_QUBITS_ENV = "ANCILLA_SEARCH_MAX_QUBITS"
DEFAULT_MAX_BLOCK_DIM = 2**6
UNITARY_TOL = 1e-10

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


def max_qubits() -> int:
    """Qubit cap, overridable through ``ANCILLA_SEARCH_MAX_QUBITS``."""
    raw = os.environ.get(MAX_QUBITS_ENV)
    if raw is None:
        return DEFAULT_MAX_QUBITS
    try:
        cap = int(raw)
    except ValueError:
        raise CapacityError(f"{MAX_QUBITS_ENV}={raw!r} is not an integer") from None
    if cap < 1:
        raise CapacityError(f"{MAX_QUBITS_ENV} must be >= 1, got {cap}")
    return cap


def check_capacity(num_qubits: int) -> None:
    cap = max_qubits()
    if num_qubits < 1 or num_qubits > cap:
        raise CapacityError(f"{num_qubits} qubits requested; allowed range is 1..{cap}")


@dataclass
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise ValidationError(
                f"expected {1 << self.num_qubits} amplitudes, got shape {self.amplitudes.shape}"
            )

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def tensor(self) -> np.ndarray:
        """Writable ``[2] * q`` view of the amplitudes."""
        return self.amplitudes.reshape((2,) * self.num_qubits)


@dataclass
class QueryLedger:
    """Counts oracle invocations. Only ever incremented."""

    queries: int = 0

    def record(self) -> None:
        self.queries += 1


@dataclass(frozen=True)
class RegisterLayout:
    """Index register, flag qubit and ``M`` ancilla registers of ``n`` bits each.

    Qubits ``0..n-1`` hold the index, qubit ``n`` is the flag, and ancilla
    register ``j`` occupies ``n + 1 + j*n .. n + (j+1)*n``.
    """

    n: int
    M: int = 0
    index: tuple[int, ...] = field(init=False)
    flag: int = field(init=False)
    ancillas: tuple[tuple[int, ...], ...] = field(init=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"index width must be >= 1, got {self.n}")
        if self.M < 0:
            raise ValidationError(f"ancilla register count must be >= 0, got {self.M}")
        n = self.n
        object.__setattr__(self, "index", tuple(range(n)))
        object.__setattr__(self, "flag", n)
        object.__setattr__(
            self,
            "ancillas",
            tuple(tuple(range(n + 1 + j * n, n + 1 + (j + 1) * n)) for j in range(self.M)),
        )

    @property
    def total_qubits(self) -> int:
        return self.n + 1 + self.M * self.n

    @property
    def ancilla_qubits(self) -> tuple[int, ...]:
        return tuple(q for reg in self.ancillas for q in reg)

    def check_state(self, state: StateVector) -> None:
        if state.num_qubits != self.total_qubits:
            raise ValidationError(
                f"layout needs {self.total_qubits} qubits, state has {state.num_qubits}"
            )


@dataclass(frozen=True)
class GateOp:
    """One gate application.

    ``kind`` is one of ``H``, ``X``, ``CNOT``, ``CCX``, ``ControlledBlock`` or
    ``OracleFlip``. For the controlled kinds the controls come first in
    ``qubits`` and the target last. ``ControlledBlock`` keeps its controls in
    ``controls`` and its ordered targets in ``qubits``.
    """

    kind: str
    qubits: tuple[int, ...] = ()
    controls: tuple[int, ...] = ()
    block: np.ndarray | None = field(default=None, compare=False)
    marked: int | None = None

    def __post_init__(self):
        arity = {"H": 1, "X": 1, "CNOT": 2, "CCX": 3}
        if self.kind in arity:
            if len(self.qubits) != arity[self.kind]:
                raise ValidationError(f"{self.kind} takes {arity[self.kind]} qubits")
        elif self.kind == "ControlledBlock":
            if self.block is None:
                raise ValidationError("ControlledBlock needs a block")
            check_unitary(self.block, len(self.qubits))
        elif self.kind == "OracleFlip":
            if self.marked is None:
                raise ValidationError("OracleFlip needs a marked index")
        else:
            raise ValidationError(f"unknown gate kind {self.kind!r}")
        _check_distinct(tuple(self.qubits) + tuple(self.controls), None)


def _check_distinct(qubits: Sequence[int], num_qubits: int | None) -> None:
    if len(set(qubits)) != len(qubits):
        raise DomainError(f"qubit indices must be distinct, got {tuple(qubits)}")
    for k in qubits:
        if k < 0 or (num_qubits is not None and k >= num_qubits):
            raise DomainError(f"qubit {k} out of range for {num_qubits} qubits")


def _select(state: StateVector, fixed: dict[int, int]) -> np.ndarray:
    """View of the amplitudes with the given qubits pinned to bit values.

    Pinned axes are kept with length 1 so the result is always a view.
    """
    q = state.num_qubits
    idx: list = [slice(None)] * q
    for k, bit in fixed.items():
        idx[q - 1 - k] = slice(bit, bit + 1)
    return state.tensor()[tuple(idx)]


def new_basis(q: int, index: int) -> StateVector:
    check_capacity(q)
    if not 0 <= index < (1 << q):
        raise DomainError(f"basis index {index} out of range for {q} qubits")
    amps = np.zeros(1 << q, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(q, amps)


def apply_h(state: StateVector, k: int) -> StateVector:
    _check_distinct((k,), state.num_qubits)
    v = state.amplitudes.reshape(-1, 2, 1 << k)
    a0 = v[:, 0, :].copy()
    a1 = v[:, 1, :]
    v[:, 0, :] = (a0 + a1) * _INV_SQRT2
    v[:, 1, :] = (a0 - a1) * _INV_SQRT2
    return state


def apply_z(state: StateVector, k: int) -> StateVector:
    _check_distinct((k,), state.num_qubits)
    state.amplitudes.reshape(-1, 2, 1 << k)[:, 1, :] *= -1
    return state


def _controlled_x(state: StateVector, controls: Sequence[int], target: int) -> StateVector:
    _check_distinct(tuple(controls) + (target,), state.num_qubits)
    fixed = {c: 1 for c in controls}
    lo = _select(state, {**fixed, target: 0})
    hi = _select(state, {**fixed, target: 1})
    tmp = lo.copy()
    lo[...] = hi
    hi[...] = tmp
    return state


def apply_x(state: StateVector, k: int) -> StateVector:
    return _controlled_x(state, (), k)


def apply_cnot(state: StateVector, control: int, target: int) -> StateVector:
    return _controlled_x(state, (control,), target)


def apply_ccx(state: StateVector, c1: int, c2: int, target: int) -> StateVector:
    return _controlled_x(state, (c1, c2), target)


def check_unitary(u: np.ndarray, num_targets: int | None = None, tol: float = UNITARY_TOL) -> None:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValidationError(f"block must be square, got shape {u.shape}")
    if num_targets is not None and u.shape[0] != 1 << num_targets:
        raise ValidationError(f"block of dim {u.shape[0]} does not match {num_targets} targets")
    err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if err > tol:
        raise ValidationError(f"block is not unitary (max |U^dag U - I| = {err:.3e})")


def apply_controlled_block(
    state: StateVector,
    controls: Iterable[int],
    targets: Sequence[int],
    u: np.ndarray,
) -> StateVector:
    """Apply ``u`` to ``targets`` where every control is 1.

    Bit ``j`` of the row/column index of ``u`` corresponds to ``targets[j]``.
    """
    controls = tuple(controls)
    targets = tuple(targets)
    if not targets:
        raise DomainError("controlled block needs at least one target")
    _check_distinct(controls + targets, state.num_qubits)
    u = np.asarray(u, dtype=np.complex128)
    check_unitary(u, len(targets))

    q = state.num_qubits
    sub = _select(state, {c: 1 for c in controls})
    k = len(targets)
    src = [q - 1 - targets[j] for j in reversed(range(k))]
    dst = list(range(q - k, q))
    moved = np.moveaxis(sub, src, dst)
    flat = moved.reshape(-1, 1 << k)
    moved[...] = (flat @ u.T).reshape(moved.shape)
    return state


def apply_phase_on_pattern(state: StateVector, register: Sequence[int], value: int) -> StateVector:
    """Multiply by -1 every amplitude whose ``register`` bits spell ``value``."""
    _check_distinct(tuple(register), state.num_qubits)
    if not 0 <= value < (1 << len(register)):
        raise DomainError(f"value {value} out of range for a {len(register)}-qubit register")
    fixed = {k: (value >> j) & 1 for j, k in enumerate(register)}
    _select(state, fixed)[...] *= -1
    return state


def apply_oracle_flip(
    state: StateVector, layout: RegisterLayout, d: int, ledger: QueryLedger
) -> StateVector:
    """Bit-flip oracle: toggle the flag on basis states whose index equals ``d``."""
    if not 0 <= d < (1 << layout.n):
        raise DomainError(f"marked index {d} out of range for n={layout.n}")
    if state.num_qubits < layout.n + 1:
        raise ValidationError("state too small for layout")
    controls = {k: (d >> j) & 1 for j, k in enumerate(layout.index)}
    lo = _select(state, {**controls, layout.flag: 0})
    hi = _select(state, {**controls, layout.flag: 1})
    tmp = lo.copy()
    lo[...] = hi
    hi[...] = tmp
    ledger.record()
    return state


def apply_phase_oracle(
    state: StateVector, register: Sequence[int], d: int, ledger: QueryLedger
) -> StateVector:
    """Phase oracle: negate amplitudes where ``register`` holds ``d``. One query."""
    if not 0 <= d < (1 << len(register)):
        raise DomainError(f"marked index {d} out of range for a {len(register)}-qubit register")
    apply_phase_on_pattern(state, register, d)
    ledger.record()
    return state


def inner_product(a: StateVector, b: StateVector) -> complex:
    if a.num_qubits != b.num_qubits:
        raise DomainError(f"qubit counts differ: {a.num_qubits} vs {b.num_qubits}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def marginal_prob(state: StateVector, register: Sequence[int], value: int) -> float:
    """Probability that measuring ``register`` yields ``value``.

    Bit ``j`` of ``value`` is the outcome of ``register[j]``.
    """
    register = tuple(register)
    _check_distinct(register, state.num_qubits)
    if not 0 <= value < (1 << len(register)):
        raise DomainError(f"value {value} out of range for a {len(register)}-qubit register")
    fixed = {k: (value >> j) & 1 for j, k in enumerate(register)}
    sel = _select(state, fixed)
    p = float(np.sum(np.abs(sel) ** 2))
    return min(max(p, 0.0), 1.0)


def register_distribution(state: StateVector, register: Sequence[int]) -> np.ndarray:
    """Outcome distribution of ``register``; entry ``v`` is ``marginal_prob(.., v)``."""
    register = tuple(register)
    _check_distinct(register, state.num_qubits)
    q = state.num_qubits
    probs = np.abs(state.tensor()) ** 2
    keep = [q - 1 - k for k in reversed(register)]
    rest = tuple(ax for ax in range(q) if ax not in keep)
    summed = probs.sum(axis=rest) if rest else probs
    # summed keeps the register axes in ascending-axis order; reorder to
    # most-significant register bit first so reshape(-1) gives the value index.
    order = sorted(keep)
    perm = [order.index(ax) for ax in keep]
    return np.transpose(summed, perm).reshape(-1)


def random_unitary(
    dim: int,
    seed: int | np.random.Generator | None = None,
    max_dim: int = DEFAULT_MAX_BLOCK_DIM,
) -> np.ndarray:
    """Haar-distributed unitary from the QR decomposition of a complex Ginibre matrix."""
    if dim < 1 or dim & (dim - 1):
        raise DomainError(f"dim must be a power of two, got {dim}")
    if dim > max_dim:
        raise CapacityError(f"block dim {dim} exceeds cap {max_dim}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def uniform_superposition(q: int) -> StateVector:
    state = new_basis(q, 0)
    for k in range(q):
        apply_h(state, k)
    return state


def schmidt_rank(state: StateVector, subsystem: Sequence[int], tol: float = 1e-10) -> int:
    """Number of singular values above ``tol`` across the cut ``subsystem`` | rest."""
    subsystem = tuple(subsystem)
    _check_distinct(subsystem, state.num_qubits)
    q = state.num_qubits
    a_axes = [q - 1 - k for k in subsystem]
    b_axes = [ax for ax in range(q) if ax not in a_axes]
    mat = np.transpose(state.tensor(), a_axes + b_axes).reshape(1 << len(a_axes), -1)
    sv = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(sv > tol))


def apply_op(
    state: StateVector,
    op: GateOp,
    ledger: QueryLedger | None = None,
    layout: RegisterLayout | None = None,
) -> StateVector:
    """Dispatch one :class:`GateOp`. ``OracleFlip`` needs a layout and a ledger."""
    if op.kind == "H":
        return apply_h(state, op.qubits[0])
    if op.kind == "X":
        return apply_x(state, op.qubits[0])
    if op.kind == "CNOT":
        return apply_cnot(state, *op.qubits)
    if op.kind == "CCX":
        return apply_ccx(state, *op.qubits)
    if op.kind == "ControlledBlock":
        return apply_controlled_block(state, op.controls, op.qubits, op.block)
    if layout is None or ledger is None:
        raise ValidationError("OracleFlip needs a register layout and a query ledger")
    return apply_oracle_flip(state, layout, op.marked, ledger)
