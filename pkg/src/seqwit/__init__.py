"""Simulation of sequential entanglement witnessing by chains of independent
Alices and Bobs performing unsharp Pauli measurements on a shared qubit pair."""

from .experiments import (
    ExperimentReport,
    ScenarioConfig,
    feasibility_frontier,
    reproduce_d_matrix,
    run_scenario,
)
from .measurement import (
    Side,
    SideSharpness,
    WeakPovm,
    joint_outcome_probability,
    luders_channel,
    luders_channel_bruteforce,
    povm_elements,
    witness_probability_sum,
)
from .qcore import (
    CorrelatorTriple,
    InitialStateSpec,
    PauliAxis,
    TwoQubitState,
    correlators,
    initial_state,
    kron,
    pauli,
)
from .sequences import (
    SATURATED,
    SequenceParams,
    SharpnessProfile,
    asymptotic_coefficients,
    find_theta,
    limit_gap_L,
    pandit_sequence,
    theta_sequence,
    threshold_f,
)
from .witness import (
    WitnessParams,
    WitnessReport,
    difference_gap,
    sample_separable_expectations,
    witness_expectation,
    witness_expectation_closed_form,
    witness_matrix,
)

__version__ = "0.1.0"
