"""Exact two-qubit entanglement dynamics in band-gap reservoirs via pseudomodes."""
from .dynamics import (
    AmplitudeState,
    SystemParams,
    Trajectory,
    build_generator,
    excitation_norm,
    propagate_eigen,
    propagate_rk,
)
from .entanglement import (
    DEFAULT_INIT,
    EsdReport,
    QubitPairInit,
    analyze,
    build_rho_ab,
    concurrence_closed_form,
    concurrence_series,
    concurrence_wootters,
    find_esd_onset,
)
from .errors import DomainError, InvalidParameters, StiffnessError
from .spectral import (
    PseudomodeParams,
    SpectralDensity,
    critical_detuning_numeric,
    critical_detuning_paper,
    derive_pseudomode_params,
    evaluate_density,
    is_perfect_gap,
    validate,
)

__version__ = "0.1.0"
