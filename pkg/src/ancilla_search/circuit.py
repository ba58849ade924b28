"""Line-oriented circuit description format.

::

    # comments start with '#'
    qubits 3
    h 0
    cx 0 1
    ccx 0 1 2
    oracle 1

``oracle <d>`` is the bit-flip oracle with the index register on qubits
``0..q-2`` and the flag on qubit ``q-1``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError
from .statevector import GateOp, QueryLedger, RegisterLayout, StateVector, apply_op, new_basis

MNEMONICS = {"h": ("H", 1), "x": ("X", 1), "cx": ("CNOT", 2), "ccx": ("CCX", 3), "oracle": ("OracleFlip", 1)}
_KIND_TO_MNEMONIC = {kind: name for name, (kind, _) in MNEMONICS.items()}


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    ops: tuple[GateOp, ...] = ()

    @property
    def oracle_layout(self) -> RegisterLayout | None:
        if self.num_qubits < 2:
            return None
        return RegisterLayout(self.num_qubits - 1, 0)


def _int(token: str, lineno: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise ParseError(f"expected an integer, got {token!r}", lineno) from None
    if value < 0:
        raise ParseError(f"expected a non-negative integer, got {value}", lineno)
    return value


def parse_circuit(text: str) -> Circuit:
    num_qubits = None
    ops: list[GateOp] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        head, args = tokens[0].lower(), tokens[1:]
        if head == "qubits":
            if num_qubits is not None:
                raise ParseError("duplicate 'qubits' header", lineno)
            if len(args) != 1:
                raise ParseError("'qubits' takes exactly one argument", lineno)
            num_qubits = _int(args[0], lineno)
            if num_qubits < 1:
                raise ParseError("circuit needs at least one qubit", lineno)
            continue
        if num_qubits is None:
            raise ParseError("missing 'qubits <q>' header before the first gate", lineno)
        if head not in MNEMONICS:
            raise ParseError(f"unknown mnemonic {tokens[0]!r}", lineno)
        kind, arity = MNEMONICS[head]
        if len(args) != arity:
            raise ParseError(f"'{head}' takes {arity} argument(s), got {len(args)}", lineno)
        values = tuple(_int(a, lineno) for a in args)
        if kind == "OracleFlip":
            if num_qubits < 2:
                raise ParseError("oracle needs at least 2 qubits (index + flag)", lineno)
            if values[0] >= 1 << (num_qubits - 1):
                raise ParseError(
                    f"marked index {values[0]} out of range for a {num_qubits - 1}-qubit index", lineno
                )
            ops.append(GateOp("OracleFlip", marked=values[0]))
            continue
        for k in values:
            if k >= num_qubits:
                raise ParseError(f"qubit {k} out of range for {num_qubits} qubits", lineno)
        if len(set(values)) != len(values):
            raise ParseError(f"qubit indices must be distinct, got {values}", lineno)
        ops.append(GateOp(kind, values))
    if num_qubits is None:
        raise ParseError("missing 'qubits <q>' header", max(1, len(text.splitlines())))
    return Circuit(num_qubits, tuple(ops))


def format_circuit(circuit: Circuit) -> str:
    lines = [f"qubits {circuit.num_qubits}"]
    for op in circuit.ops:
        name = _KIND_TO_MNEMONIC[op.kind]
        args = (op.marked,) if op.kind == "OracleFlip" else op.qubits
        lines.append(" ".join([name, *map(str, args)]))
    return "\n".join(lines) + "\n"


def run_circuit(circuit: Circuit) -> tuple[StateVector, QueryLedger]:
    """Run from ``|0...0>``; oracle calls are counted on the returned ledger."""
    state = new_basis(circuit.num_qubits, 0)
    ledger = QueryLedger()
    layout = circuit.oracle_layout
    for op in circuit.ops:
        apply_op(state, op, ledger, layout)
    return state, ledger
