"""Dense state-vector and density-matrix primitives for a handful of qubits.

Qubits are addressed with 1-based indices. Qubit 1 is the most significant
bit of the amplitude index, so the ket ``|01011>`` sits at index 11.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

MAX_QUBITS = 5


class DimensionError(ValueError):
    """Raised when operand shapes or qubit counts are incompatible."""


def _n_qubits_for(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 2 or 1 << n != dim:
        raise DimensionError(f"dimension {dim} is not a power of two >= 2")
    return n


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    amps: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amps)
        if amps.ndim != 1:
            raise DimensionError("amplitudes must be a 1-D sequence")
        n = _n_qubits_for(amps.shape[0])
        if n > MAX_QUBITS:
            raise DimensionError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit limit")
        object.__setattr__(self, "amps", amps)

    @classmethod
    def basis(cls, bits: str) -> StateVector:
        """Computational basis ket from a bit string such as ``"01011"``."""
        amps = np.zeros(1 << len(bits), dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(amps)

    @classmethod
    def zeros(cls, n_qubits: int) -> StateVector:
        return cls.basis("0" * n_qubits)

    @property
    def n_qubits(self) -> int:
        return self.amps.shape[0].bit_length() - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def is_normalized(self, atol: float = 1e-12) -> bool:
        return abs(float(np.vdot(self.amps, self.amps).real) - 1.0) <= atol

    def inner(self, other: StateVector) -> complex:
        """<self|other>."""
        if other.n_qubits != self.n_qubits:
            raise DimensionError("inner product of states with different sizes")
        return complex(np.vdot(self.amps, other.amps))

    def __len__(self):
        return self.amps.shape[0]


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Square 2^n x 2^n operator.

    Unit trace is not enforced: unnormalized conditional outputs are
    first-class values here, and intermediate products such as ``M rho``
    need not be Hermitian either. Use :meth:`is_hermitian` and
    :meth:`min_eigenvalue` to check physical validity explicitly.
    """

    entries: np.ndarray

    def __post_init__(self):
        m = _frozen(self.entries)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"density matrix must be square, got shape {m.shape}")
        n = _n_qubits_for(m.shape[0])
        if n > MAX_QUBITS:
            raise DimensionError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit limit")
        object.__setattr__(self, "entries", m)

    @property
    def n_qubits(self) -> int:
        return self.entries.shape[0].bit_length() - 1

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.entries, self.entries.conj().T, rtol=0, atol=atol))

    def min_eigenvalue(self) -> float:
        herm = (self.entries + self.entries.conj().T) / 2
        return float(np.linalg.eigvalsh(herm)[0])

    def __add__(self, other: DensityMatrix) -> DensityMatrix:
        if other.n_qubits != self.n_qubits:
            raise DimensionError("cannot add density matrices of different sizes")
        return DensityMatrix(self.entries + other.entries)

    def scaled(self, factor: complex) -> DensityMatrix:
        return DensityMatrix(self.entries * factor)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Kronecker product with ``a`` occupying the high-order qubits."""
    if a.n_qubits + b.n_qubits > MAX_QUBITS:
        raise DimensionError(
            f"tensor of {a.n_qubits} and {b.n_qubits} qubits exceeds {MAX_QUBITS}"
        )
    return StateVector(np.kron(a.amps, b.amps))


def _check_qubits(qubits: Sequence[int], n: int) -> list[int]:
    qs = [int(q) for q in qubits]
    if len(set(qs)) != len(qs):
        raise ValueError(f"duplicate qubit index in {qs}")
    for q in qs:
        if not 1 <= q <= n:
            raise DimensionError(f"qubit index {q} out of range 1..{n}")
    return qs


def _left_apply(block: np.ndarray, op: np.ndarray, qubits: list[int], n: int) -> np.ndarray:
    # block has shape (2^n, ...) ; op acts on the row index only
    k = len(qubits)
    if qubits == list(range(1, n + 1)):
        return op @ block
    tail = block.shape[1:]
    t = block.reshape((2,) * n + tail)
    axes = [q - 1 for q in qubits]
    t = np.tensordot(op.reshape((2,) * (2 * k)), t, axes=(list(range(k, 2 * k)), axes))
    # tensordot puts the k new axes first; move them back into place
    t = np.moveaxis(t, list(range(k)), axes)
    return t.reshape(block.shape)


def apply_operator(target, op, qubits: Sequence[int], *, conjugate: bool = False):
    """Apply a k-qubit matrix ``op`` to the listed qubits of ``target``.

    For a :class:`StateVector` this returns ``op |psi>`` with identity on the
    other qubits. For a :class:`DensityMatrix` it left-multiplies by default;
    pass ``conjugate=True`` to get ``op rho op^dagger``.
    """
    op = np.asarray(op, dtype=complex)
    n = target.n_qubits
    qs = _check_qubits(qubits, n)
    k = len(qs)
    if op.shape != (1 << k, 1 << k):
        raise DimensionError(f"operator shape {op.shape} does not act on {k} qubit(s)")

    if isinstance(target, StateVector):
        if conjugate:
            raise ValueError("conjugate applies to density matrices only")
        return StateVector(_left_apply(target.amps, op, qs, n))
    if isinstance(target, DensityMatrix):
        m = _left_apply(target.entries, op, qs, n)
        if conjugate:
            # (op (op rho)^dag)^dag = op rho op^dag
            m = _left_apply(m.conj().T, op, qs, n).conj().T
        return DensityMatrix(m)
    raise TypeError(f"cannot apply operator to {type(target).__name__}")


def density_from_state(psi: StateVector, weight: float = 1.0) -> DensityMatrix:
    if weight < 0:
        raise ValueError(f"weight must be non-negative, got {weight}")
    return DensityMatrix(weight * np.outer(psi.amps, psi.amps.conj()))


def partial_trace(rho: DensityMatrix, traced_out: Sequence[int]) -> DensityMatrix:
    n = rho.n_qubits
    qs = _check_qubits(traced_out, n)
    if not qs:
        raise ValueError("nothing to trace out")
    if len(qs) == n:
        raise DimensionError("cannot trace out every qubit")
    keep = [q for q in range(n) if q + 1 not in qs]
    gone = sorted(q - 1 for q in qs)
    t = rho.entries.reshape((2,) * (2 * n))
    # pair each traced row axis with its column axis and sum the diagonal
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = list(letters[:n])
    cols = list(letters[n : 2 * n])
    for q in gone:
        cols[q] = rows[q]
    out = "".join(rows[q] for q in keep) + "".join(cols[q] for q in keep)
    reduced = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    d = 1 << len(keep)
    return DensityMatrix(reduced.reshape(d, d))


def fidelity_pure(psi: StateVector, rho: DensityMatrix) -> float:
    """<psi| rho |psi>, which must come out real."""
    if psi.n_qubits != rho.n_qubits:
        raise DimensionError(
            f"state on {psi.n_qubits} qubits vs density matrix on {rho.n_qubits}"
        )
    val = complex(np.vdot(psi.amps, rho.entries @ psi.amps))
    if abs(val.imag) >= 1e-12:
        raise ValueError(f"overlap has imaginary part {val.imag:.3e}; rho is not Hermitian")
    return val.real
