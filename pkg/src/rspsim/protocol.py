"""Noiseless simultaneous remote state preparation over the five-qubit cluster state.

Alice holds qubits 1-2 (a1, a2), Bob holds qubit 3 (b1) and Candy holds
qubits 4-5 (c1, c2). Alice measures her pair in a parameter-dependent basis,
announces the outcome, and the receivers apply Pauli corrections to recover
``alpha|0> + beta|1>`` at Bob and ``gamma|00> + delta|11>`` at Candy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .qcore import StateVector, apply_operator, tensor

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
# sigma_x sigma_z as a matrix product: sigma_z acts first
SXSZ = SX @ SZ

ALICE = (1, 2)
BOB = (3,)
CANDY = (4, 5)
RECEIVERS = (3, 4, 5)

_NORM_TOL = 1e-12


@dataclass(frozen=True)
class ProtocolParams:
    """Real coefficients of the two targets ``alpha|0>+beta|1>`` and ``gamma|00>+delta|11>``."""

    alpha: float
    beta: float
    gamma: float
    delta: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            v = getattr(self, name)
            if isinstance(v, complex) or np.iscomplexobj(v):
                raise TypeError(f"{name} must be real")
            v = float(v)
            if not math.isfinite(v) or abs(v) > 1 + _NORM_TOL:
                raise ValueError(f"{name}={v} outside [-1, 1]")
            object.__setattr__(self, name, v)
        if abs(self.alpha**2 + self.beta**2 - 1) > _NORM_TOL:
            raise ValueError(f"alpha^2 + beta^2 = {self.alpha**2 + self.beta**2}, expected 1")
        if abs(self.gamma**2 + self.delta**2 - 1) > _NORM_TOL:
            raise ValueError(f"gamma^2 + delta^2 = {self.gamma**2 + self.delta**2}, expected 1")

    @classmethod
    def from_probabilities(cls, alpha2: float, gamma2: float) -> ProtocolParams:
        """Build from squared coefficients, taking positive square roots."""
        for name, v in (("alpha2", alpha2), ("gamma2", gamma2)):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        return cls(
            math.sqrt(alpha2), math.sqrt(1.0 - alpha2), math.sqrt(gamma2), math.sqrt(1.0 - gamma2)
        )


@dataclass(frozen=True)
class MeasurementBasis:
    vectors: tuple[StateVector, StateVector, StateVector, StateVector]

    def matrix(self) -> np.ndarray:
        """Columns are the basis vectors."""
        return np.column_stack([v.amps for v in self.vectors])

    def gram(self) -> np.ndarray:
        m = self.matrix()
        return m.conj().T @ m


@dataclass(frozen=True)
class OutcomeRecord:
    outcome_index: int
    probability: float
    bob_state: StateVector
    candy_state: StateVector
    post_correction_fidelity: float


def cluster_state() -> StateVector:
    """(|00000> + |01011> + |10100> - |11111>) / 2."""
    amps = np.zeros(32, dtype=complex)
    amps[0b00000] = 0.5
    amps[0b01011] = 0.5
    amps[0b10100] = 0.5
    amps[0b11111] = -0.5
    return StateVector(amps)


def make_targets(p: ProtocolParams) -> tuple[StateVector, StateVector, StateVector]:
    """Return (Bob's target, Candy's target, their product on b1 c1 c2)."""
    s1 = StateVector([p.alpha, p.beta])
    s2 = StateVector([p.gamma, 0, 0, p.delta])
    return s1, s2, tensor(s1, s2)


def measurement_basis(p: ProtocolParams) -> MeasurementBasis:
    a, b, g, d = p.alpha, p.beta, p.gamma, p.delta
    # amplitudes on |00>, |01>, |10>, |11> of a1 a2
    return MeasurementBasis(
        (
            StateVector([a * g, a * d, b * g, -b * d]),
            StateVector([a * d, -a * g, -b * d, -b * g]),
            StateVector([b * g, b * d, -a * g, a * d]),
            StateVector([b * d, -b * g, a * d, a * g]),
        )
    )


_CORRECTIONS = {
    1: (I2, np.kron(I2, I2)),
    2: (SZ, np.kron(SX, SXSZ)),
    3: (SXSZ, np.kron(I2, I2)),
    4: (SX, np.kron(SX, SXSZ)),
}
# Bob's and Candy's corrections as one operator on b1 c1 c2
_JOINT = {i: np.kron(u, v) for i, (u, v) in _CORRECTIONS.items()}


def correction_ops(outcome: int) -> tuple[np.ndarray, np.ndarray]:
    """Bob's 2x2 and Candy's 4x4 correction for an outcome in 1..4."""
    if outcome not in _CORRECTIONS:
        raise ValueError(f"outcome must be 1..4, got {outcome}")
    u, v = _CORRECTIONS[outcome]
    return u.copy(), v.copy()


def residual_states(p: ProtocolParams, channel: StateVector | None = None) -> list[StateVector]:
    """Unnormalized b1 c1 c2 states left after each of Alice's four outcomes.

    Entry ``i-1`` is ``(<xi_i| x I) |channel>``, so the channel equals the sum
    over outcomes of ``|xi_i> x residual_i``.
    """
    if channel is None:
        channel = cluster_state()
    block = measurement_basis(p).matrix().conj().T @ channel.amps.reshape(4, 8)
    return [StateVector(row) for row in block]


def residual_state(p: ProtocolParams, outcome: int, channel: StateVector | None = None) -> StateVector:
    if outcome not in _CORRECTIONS:
        raise ValueError(f"outcome must be 1..4, got {outcome}")
    return residual_states(p, channel)[outcome - 1]


def _split_product(state: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # rank-1 split of a b1 x (c1 c2) state; phase fixed so the largest Bob amplitude is real positive
    u, s, vh = np.linalg.svd(state.reshape(2, 4))
    bob, candy = u[:, 0], vh[0] * s[0]
    k = int(np.argmax(np.abs(bob)))
    phase = bob[k] / abs(bob[k])
    return bob / phase, candy * phase


def run_ideal(p: ProtocolParams) -> list[OutcomeRecord]:
    """Project exactly onto each outcome, apply the receivers' corrections, score against the target."""
    _, _, target = make_targets(p)
    records = []
    for i, res in enumerate(residual_states(p), start=1):
        prob = float(np.vdot(res.amps, res.amps).real)
        # residual is indexed locally: b1 -> 1, c1 c2 -> 2 3
        fixed = apply_operator(res, _JOINT[i], (1, 2, 3))
        normed = StateVector(fixed.amps / np.sqrt(prob))
        bob, candy = _split_product(normed.amps)
        records.append(
            OutcomeRecord(
                outcome_index=i,
                probability=prob,
                bob_state=StateVector(bob),
                candy_state=StateVector(candy / np.linalg.norm(candy)),
                post_correction_fidelity=abs(target.inner(normed)) ** 2,
            )
        )
    return records


def sample_outcome(probabilities: Sequence[float], seed: int) -> int:
    """Draw an outcome in 1..4 from ``probabilities`` using a fresh generator."""
    probs = np.asarray(probabilities, dtype=float)
    if probs.shape != (4,):
        raise ValueError(f"expected 4 probabilities, got {probs.shape}")
    if np.any(probs < 0):
        raise ValueError(f"negative probability in {probs.tolist()}")
    if abs(probs.sum() - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {probs.sum()}, expected 1")
    rng = np.random.default_rng(seed)
    return int(rng.choice(4, p=probs / probs.sum())) + 1
