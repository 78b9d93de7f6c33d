"""Simultaneous remote preparation of a one-qubit and a two-qubit state over a five-qubit cluster channel."""

__version__ = "0.1.0"

from .circuit import Circuit, Gate, GateKind, QasmError, build_cluster_circuit, export_qasm, parse_qasm, run_circuit
from .noise import (
    FidelityConvention,
    KrausChannel,
    NoiseKind,
    apply_local_noise,
    average_fidelity,
    closed_form_fidelity,
    conditional_output,
    fidelity_noisy,
    kraus_channel,
)
from .protocol import (
    MeasurementBasis,
    OutcomeRecord,
    ProtocolParams,
    cluster_state,
    correction_ops,
    make_targets,
    measurement_basis,
    run_ideal,
    sample_outcome,
)
from .qcore import (
    DensityMatrix,
    DimensionError,
    StateVector,
    apply_operator,
    density_from_state,
    fidelity_pure,
    partial_trace,
    tensor,
)
