"""Nondestructive identification of Bell diagonal states.

Thin wrapper around the compiled core: protocol algebra, finite-shot
sampling and the cavity-QED realization of the step unitaries.
"""

from bdsid._core import (
    BellCoefficients,
    CavityBaseConfig,
    CavityParams,
    EffectiveCoefficients,
    EstimateReport,
    GateFidelityResult,
    IdentificationResult,
    ProtocolStepReport,
    SimulationComparison,
    TimeSeries,
    apply_step,
    bds_density,
    bell_state,
    build_bipartite_factors,
    build_step_unitary,
    coefficients_for_step,
    effective_hamiltonian,
    estimate,
    full_gate_fidelity,
    full_hamiltonian,
    gate_fidelity_phase_invariant,
    gate_time,
    kron,
    make_cavity_params,
    matexp_unitary,
    omega_b_for_step,
    outcome_probability,
    partial_trace,
    recover_coefficients,
    run_ideal_identification,
    sample_step,
    simulate_comparison,
    trace_distance,
    tune_delta1,
)

__version__ = "1.0.0"

__all__ = [
    "BellCoefficients",
    "CavityBaseConfig",
    "CavityParams",
    "EffectiveCoefficients",
    "EstimateReport",
    "GateFidelityResult",
    "IdentificationResult",
    "ProtocolStepReport",
    "SimulationComparison",
    "TimeSeries",
    "apply_step",
    "bds_density",
    "bell_state",
    "build_bipartite_factors",
    "build_step_unitary",
    "coefficients_for_step",
    "effective_hamiltonian",
    "estimate",
    "full_gate_fidelity",
    "full_hamiltonian",
    "gate_fidelity_phase_invariant",
    "gate_time",
    "kron",
    "make_cavity_params",
    "matexp_unitary",
    "omega_b_for_step",
    "outcome_probability",
    "partial_trace",
    "recover_coefficients",
    "run_ideal_identification",
    "sample_step",
    "simulate_comparison",
    "trace_distance",
    "tune_delta1",
]
