"""Steady-state and quantum-trajectory simulator for a laser whose gain
medium is an interacting XXZ spin chain coupled to a single lossy cavity."""

from .hilbert import SpaceDescriptor, SparseOperator, boson_operator, compose, spin_operator
from .model import (
    LiouvillianMatrix,
    SystemParams,
    apply_dissipator,
    build_hxxz,
    build_htc,
    build_liouvillian,
)
from .ness import (
    AdaptiveResult,
    DensityMatrix,
    NessDiagnostics,
    adaptive_cutoff_ness,
    solve_ness,
    solve_ness_auto,
    solve_ness_reduced,
    validate_density_matrix,
)
from .observables import (
    BrightState,
    SpectralRecord,
    bright_states,
    cooperativity_fraction,
    cooperativity_xxz,
    diagonalize_xxz,
    g2_zero,
    partial_trace_cavity,
    photon_number,
    spectral_decomposition,
    total_magnetization,
    zz_correlation,
)
from .trajectories import (
    EnsembleEstimate,
    Schedule,
    TrajectoryState,
    default_schedule,
    estimate_ensemble,
    run_diffusive_trajectory,
    run_jump_trajectory,
)

__version__ = "0.1.0"
