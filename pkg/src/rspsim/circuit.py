"""Gate-list circuits, the cluster-state preparation circuit, and OpenQASM 2.0 I/O."""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass

import numpy as np

from .qcore import DimensionError, MAX_QUBITS, StateVector, apply_operator

_S = 1 / np.sqrt(2)
_MATRICES = {
    "H": np.array([[_S, _S], [_S, -_S]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "CNOT": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
}


class GateKind(str, enum.Enum):
    H = "H"
    X = "X"
    Z = "Z"
    CNOT = "CNOT"

    @property
    def arity(self) -> int:
        return 2 if self is GateKind.CNOT else 1

    @property
    def qasm_name(self) -> str:
        return "cx" if self is GateKind.CNOT else self.value.lower()


_BY_QASM = {k.qasm_name: k for k in GateKind}


@dataclass(frozen=True)
class Gate:
    """One gate application; for CNOT the control comes first."""

    kind: GateKind
    qubits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        qs = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qs)
        if len(qs) != self.kind.arity:
            raise ValueError(f"{self.kind.value} takes {self.kind.arity} qubit(s), got {qs}")
        if len(set(qs)) != len(qs):
            raise ValueError(f"{self.kind.value} needs distinct qubits, got {qs}")
        if any(q < 1 for q in qs):
            raise ValueError(f"qubit indices are 1-based, got {qs}")

    @property
    def matrix(self) -> np.ndarray:
        return _MATRICES[self.kind.value]


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise DimensionError(f"circuit width must be 1..{MAX_QUBITS}, got {self.n_qubits}")
        gates = tuple(self.gates)
        object.__setattr__(self, "gates", gates)
        for g in gates:
            if max(g.qubits) > self.n_qubits:
                raise DimensionError(f"{g} exceeds circuit width {self.n_qubits}")

    def __len__(self):
        return len(self.gates)

    def prefix(self, k: int) -> Circuit:
        return Circuit(self.n_qubits, self.gates[:k])


def build_cluster_circuit() -> Circuit:
    """Two Hadamards and four CNOTs taking |00000> to the five-qubit cluster state."""
    return Circuit(
        5,
        (
            Gate(GateKind.H, (1,)),
            Gate(GateKind.CNOT, (1, 2)),
            Gate(GateKind.H, (2,)),
            Gate(GateKind.CNOT, (1, 3)),
            Gate(GateKind.CNOT, (2, 4)),
            Gate(GateKind.CNOT, (2, 5)),
        ),
    )


def run_circuit(c: Circuit, initial: StateVector | None = None) -> StateVector:
    if initial is None:
        initial = StateVector.zeros(c.n_qubits)
    if initial.n_qubits != c.n_qubits:
        raise DimensionError(
            f"circuit on {c.n_qubits} qubits given a {initial.n_qubits}-qubit state"
        )
    state = initial
    for g in c.gates:
        state = apply_operator(state, g.matrix, g.qubits)
    return state


def export_qasm(c: Circuit) -> str:
    """Serialize to OpenQASM 2.0. Output is byte-for-byte deterministic."""
    lines = [
        "OPENQASM 2.0;",
        'include "qelib1.inc";',
        "// qubit k (1-based) is q[k-1]",
        f"qreg q[{c.n_qubits}];",
    ]
    for g in c.gates:
        args = ",".join(f"q[{q - 1}]" for q in g.qubits)
        lines.append(f"{g.kind.qasm_name} {args};")
    return "\n".join(lines) + "\n"


class QasmError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


_QREG = re.compile(r"^qreg\s+([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]\s*;$")
_STMT = re.compile(r"^([A-Za-z_]\w*)\s+(.+?)\s*;$")
_REF = re.compile(r"^([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]$")


def parse_qasm(text: str) -> Circuit:
    """Parse the OpenQASM subset written by :func:`export_qasm`.

    One statement per line; ``//`` comments and blank lines are ignored.
    Anything outside h/x/z/cx on a single ``qreg`` (measure, barrier, creg,
    other gates) is rejected.
    """
    seen_version = False
    reg_name = None
    size = 0
    gates: list[Gate] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        if not seen_version:
            if re.fullmatch(r"OPENQASM\s+2\.0\s*;", line):
                seen_version = True
                continue
            raise QasmError(lineno, "expected 'OPENQASM 2.0;' header")
        if re.fullmatch(r'include\s+"qelib1\.inc"\s*;', line):
            continue
        m = _QREG.match(line)
        if m:
            if reg_name is not None:
                raise QasmError(lineno, "only one qreg declaration is supported")
            reg_name, size = m.group(1), int(m.group(2))
            if not 1 <= size <= MAX_QUBITS:
                raise QasmError(lineno, f"register size {size} outside 1..{MAX_QUBITS}")
            continue
        m = _STMT.match(line)
        if not m:
            raise QasmError(lineno, f"malformed statement {line!r}")
        name, argtext = m.group(1), m.group(2)
        kind = _BY_QASM.get(name)
        if kind is None:
            raise QasmError(lineno, f"unsupported gate or statement {name!r}")
        if reg_name is None:
            raise QasmError(lineno, "gate used before qreg declaration")
        qubits = []
        for arg in argtext.split(","):
            ref = _REF.match(arg.strip())
            if not ref or ref.group(1) != reg_name:
                raise QasmError(lineno, f"malformed register reference {arg.strip()!r}")
            idx = int(ref.group(2))
            if idx >= size:
                raise QasmError(lineno, f"index {idx} out of range for {reg_name}[{size}]")
            qubits.append(idx + 1)
        try:
            gates.append(Gate(kind, tuple(qubits)))
        except ValueError as exc:
            raise QasmError(lineno, str(exc)) from None

    if not seen_version:
        raise QasmError(1, "empty input")
    if reg_name is None:
        raise QasmError(lineno, "missing qreg declaration")
    return Circuit(size, tuple(gates))
