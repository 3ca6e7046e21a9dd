"""Steady-state energy-teleportation simulator for a dissipative two-qubit system."""

from .errors import QetError
from .experiments import (
    GridSpec,
    Scenario,
    SweepRecord,
    evaluate_point,
    figure_preset,
    preset_ids,
    run_sweep,
)
from .linalg import (
    EigenDecomposition,
    hermitian_eigendecomposition,
    integrate_generator,
    null_vector,
    stack,
    superoperator_embed,
    unstack,
)
from .protocol import (
    ProtocolResult,
    XStateParams,
    eigenstate_eout,
    injected_energy,
    optimal_angles,
    protocol_coefficients,
    protocol_operators,
    simulate_protocol,
)
from .redfield import (
    ReservoirSpec,
    SteadyStateResult,
    build_dissipator,
    build_liouvillian,
    occupation,
    qet_at_steady_state,
    rates,
    steady_state,
)
from .system import (
    Spectrum,
    SystemParams,
    TransitionSet,
    analytic_spectrum,
    basis_transform,
    build_hamiltonian,
    transition_set,
)

__version__ = "0.1.0"

__all__ = [
    "EigenDecomposition",
    "GridSpec",
    "ProtocolResult",
    "QetError",
    "ReservoirSpec",
    "Scenario",
    "Spectrum",
    "SteadyStateResult",
    "SweepRecord",
    "SystemParams",
    "TransitionSet",
    "XStateParams",
    "analytic_spectrum",
    "basis_transform",
    "build_dissipator",
    "build_hamiltonian",
    "build_liouvillian",
    "eigenstate_eout",
    "evaluate_point",
    "figure_preset",
    "hermitian_eigendecomposition",
    "injected_energy",
    "integrate_generator",
    "null_vector",
    "occupation",
    "optimal_angles",
    "preset_ids",
    "protocol_coefficients",
    "protocol_operators",
    "qet_at_steady_state",
    "rates",
    "run_sweep",
    "simulate_protocol",
    "stack",
    "steady_state",
    "superoperator_embed",
    "transition_set",
    "unstack",
]
