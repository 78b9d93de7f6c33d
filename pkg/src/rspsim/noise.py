"""Local Kraus noise on the transmitted qubits and the noisy-protocol fidelities.

Alice keeps a1, a2 noise-free; b1, c1, c2 each pass independently through
the same single-qubit channel. Two fidelity conventions are offered:

* ``PAPER_UNNORMALIZED`` starts from the cluster state with unit branch
  amplitudes (trace 4) and never renormalizes, so for a given outcome the
  fidelity is ``<Psi| rho_out |Psi>`` exactly as the published closed forms
  assume.
* ``TRACE_NORMALIZED`` divides the conditional output by its trace, giving
  the textbook post-selected fidelity.
"""
from __future__ import annotations

import enum
import functools
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .protocol import (
    ALICE,
    RECEIVERS,
    ProtocolParams,
    cluster_state,
    correction_ops,
    make_targets,
    measurement_basis,
)
from .qcore import (
    DensityMatrix,
    DimensionError,
    apply_operator,
    density_from_state,
    fidelity_pure,
    partial_trace,
)


class NoiseKind(str, enum.Enum):
    AMPLITUDE_DAMPING = "ad"
    PHASE_FLIP = "pf"
    BIT_FLIP = "bf"


class FidelityConvention(str, enum.Enum):
    PAPER_UNNORMALIZED = "paper"
    TRACE_NORMALIZED = "normalized"


@dataclass(frozen=True)
class KrausChannel:
    kind: NoiseKind
    rate: float
    operators: tuple[np.ndarray, ...]

    def completeness_error(self) -> float:
        """max |sum_j X_j^dag X_j - I|."""
        total = sum(k.conj().T @ k for k in self.operators)
        return float(np.max(np.abs(total - np.eye(2))))


def _check_rate(rate: float) -> float:
    rate = float(rate)
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"noise rate must be in [0, 1], got {rate}")
    return rate


def kraus_channel(kind: NoiseKind | str, rate: float) -> KrausChannel:
    kind = NoiseKind(kind)
    r = _check_rate(rate)
    if kind is NoiseKind.AMPLITUDE_DAMPING:
        ops = (
            np.array([[1, 0], [0, math.sqrt(1 - r)]], dtype=complex),
            np.array([[0, math.sqrt(r)], [0, 0]], dtype=complex),
        )
    elif kind is NoiseKind.PHASE_FLIP:
        ops = (
            math.sqrt(1 - r) * np.eye(2, dtype=complex),
            math.sqrt(r) * np.array([[1, 0], [0, -1]], dtype=complex),
        )
    else:
        ops = (
            math.sqrt(1 - r) * np.eye(2, dtype=complex),
            math.sqrt(r) * np.array([[0, 1], [1, 0]], dtype=complex),
        )
    for op in ops:
        op.setflags(write=False)
    return KrausChannel(kind, r, ops)


def channel_density(convention: FidelityConvention | str = FidelityConvention.PAPER_UNNORMALIZED) -> DensityMatrix:
    """Cluster-state density matrix; trace 4 under the paper convention, 1 otherwise."""
    weight = 4.0 if FidelityConvention(convention) is FidelityConvention.PAPER_UNNORMALIZED else 1.0
    return density_from_state(cluster_state(), weight)


def apply_local_noise(
    rho: DensityMatrix, ch: KrausChannel | Sequence[KrausChannel]
) -> DensityMatrix:
    """Sum over Kraus triples acting on b1, c1, c2 (qubits 3, 4, 5).

    ``ch`` may be one channel shared by all three qubits, or a sequence of
    three channels for b1, c1, c2 respectively.
    """
    if rho.n_qubits != 5:
        raise DimensionError(f"expected a 5-qubit density matrix, got {rho.n_qubits}")
    chans = [ch] * 3 if isinstance(ch, KrausChannel) else list(ch)
    if len(chans) != 3:
        raise ValueError(f"need one channel or three, got {len(chans)}")

    out = np.zeros_like(rho.entries)
    for xl, xm, xn in itertools.product(*(c.operators for c in chans)):
        op = np.kron(np.kron(xl, xm), xn)
        out += apply_operator(rho, op, RECEIVERS, conjugate=True).entries
    return DensityMatrix(out)


def measurement_operator(outcome: int, p: ProtocolParams) -> np.ndarray:
    """32x32 ``(I x U_i x V_i)(|xi_i><xi_i| x I)`` for outcome 1..4."""
    if outcome not in (1, 2, 3, 4):
        raise ValueError(f"outcome must be 1..4, got {outcome}")
    xi = measurement_basis(p).vectors[outcome - 1].amps
    u, v = correction_ops(outcome)
    projector = np.kron(np.outer(xi, xi.conj()), np.eye(8))
    correction = np.kron(np.eye(4), np.kron(u, v))
    return correction @ projector


def conditional_output(eps_rho: DensityMatrix, outcome: int, p: ProtocolParams) -> DensityMatrix:
    """Corrected b1 c1 c2 state for one outcome, left unnormalized."""
    if eps_rho.n_qubits != 5:
        raise DimensionError(f"expected a 5-qubit density matrix, got {eps_rho.n_qubits}")
    m = measurement_operator(outcome, p)
    branch = DensityMatrix(m @ eps_rho.entries @ m.conj().T)
    return partial_trace(branch, ALICE)


@functools.lru_cache(maxsize=256)
def noisy_channel(
    kind: NoiseKind | str,
    rate: float,
    convention: FidelityConvention | str = FidelityConvention.PAPER_UNNORMALIZED,
) -> DensityMatrix:
    """Cluster channel after local noise; memoized since it ignores the target parameters."""
    return apply_local_noise(channel_density(convention), kraus_channel(kind, rate))


def noisy_outputs(
    p: ProtocolParams,
    kind: NoiseKind | str,
    rate: float,
    convention: FidelityConvention | str = FidelityConvention.PAPER_UNNORMALIZED,
) -> list[DensityMatrix]:
    """Conditional outputs for outcomes 1..4 from one noisy channel evaluation."""
    eps = noisy_channel(NoiseKind(kind), float(rate), FidelityConvention(convention))
    return [conditional_output(eps, i, p) for i in range(1, 5)]


def _score(p: ProtocolParams, rho_out: DensityMatrix, convention: FidelityConvention) -> float:
    _, _, target = make_targets(p)
    f = fidelity_pure(target, rho_out)
    if convention is FidelityConvention.TRACE_NORMALIZED:
        tr = rho_out.trace().real
        # zero-probability branch: nothing to post-select
        return f / tr if tr > 1e-15 else 0.0
    return f


def fidelity_noisy(
    p: ProtocolParams,
    kind: NoiseKind | str,
    rate: float,
    outcome: int = 2,
    conv: FidelityConvention | str = FidelityConvention.PAPER_UNNORMALIZED,
) -> float:
    """Brute-force fidelity by full density-matrix evolution."""
    conv = FidelityConvention(conv)
    eps = noisy_channel(NoiseKind(kind), float(rate), conv)
    return _score(p, conditional_output(eps, outcome, p), conv)


def average_fidelity(p: ProtocolParams, kind: NoiseKind | str, rate: float) -> float:
    """Probability-weighted fidelity over all four outcomes.

    Equals the sum of ``<Psi| rho_i |Psi>`` over outcomes taken on the
    unit-trace channel, i.e. a quarter of the summed paper-convention values.
    """
    outs = noisy_outputs(p, kind, rate, FidelityConvention.TRACE_NORMALIZED)
    return sum(_score(p, r, FidelityConvention.PAPER_UNNORMALIZED) for r in outs)


def closed_form_fidelity(kind: NoiseKind | str, p: ProtocolParams, rate: float) -> float:
    """Published polynomial fidelity for outcome 2, transcribed term by term."""
    kind = NoiseKind(kind)
    r = _check_rate(rate)
    a, b, g, d = p.alpha, p.beta, p.gamma, p.delta
    if kind is NoiseKind.AMPLITUDE_DAMPING:
        lam = r
        s = math.sqrt(1 - lam)
        return (
            (a**2 * d**2 + (1 - lam) * a**2 * g**2 + s * b**2 * d**2 + s**3 * b**2 * g**2) ** 2
            + (lam * a**2 * g * d + lam * s * b**2 * g * d) ** 2
            + (math.sqrt(lam) * a * b * d**2 + (1 - lam) * math.sqrt(lam) * a * b * g**2) ** 2
            + lam**3 * a**2 * b**2 * g**2 * d**2
        )
    if kind is NoiseKind.PHASE_FLIP:
        mu = r
        ab = (a**2 - b**2) ** 2
        dg = (d**2 - g**2) ** 2
        return (
            ((1 - mu) ** 3 + (1 - mu) * mu**2)
            + 2 * (1 - mu) ** 2 * mu * dg
            + ((1 - mu) ** 2 * mu + mu**3) * ab
            + 2 * (1 - mu) * mu**2 * ab * dg
        )
    nu = r
    return (
        (1 - nu) ** 3
        + 4 * nu**2 * (1 - nu) * g**2 * d**2
        + 4 * (1 - nu) ** 2 * nu * a**2 * b**2
        + 16 * nu**3 * a**2 * b**2 * g**2 * d**2
    )
