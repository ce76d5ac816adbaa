"""Protecting nonorthogonal qubit pairs from dephasing with weak measurement and feedback.

A pair of pure states with overlap cos(theta) passes through a phase-flip
channel; a weak measurement of tunable strength and phase, followed by an
outcome-conditioned rotation, partially undoes the damage.  The package
carries the closed-form average fidelity of that scheme, its matrix-
pipeline oracle, optimizers over the control angles and the state space,
reference-figure datasets, and an invariant suite that cross-checks every
analytic route against an independent one.
"""

from .channel import (
    ControlParams,
    MeasurementPair,
    PipelineTrace,
    control_map,
    correction,
    dephase,
    frame_rotation,
    pipeline_trace,
    rotated_frame_check,
    snapshot_closed_forms,
    weak_measurements,
)
from .core import (
    BlochVector,
    StatePair,
    bloch_length,
    check_density_matrix,
    dagger,
    from_bloch,
    overlap,
    pauli,
    prepare_pair,
    purity,
    state_eigenvalues,
    to_bloch,
)
from .fidelity import (
    BaselineFidelities,
    FidelityBreakdown,
    baselines,
    beta_critical,
    eta_opt,
    eta_terms,
    fidelity_closed,
    fidelity_eta_opt,
    fidelity_phi0,
    fidelity_simulated,
)
from .figures import FIGURE_IDS, SHOWCASE_POINT, figure_dataset
from .optimize import (
    OptimizationConfig,
    OptResult,
    SweepRecord,
    curve_over_p,
    optimize_point,
    sweep_surface,
)
from .output import render_csv, render_json, write_text
from .verify import CheckResult, run_checks, unit_lattice

__version__ = "0.1.0"

__all__ = [
    "BaselineFidelities",
    "BlochVector",
    "CheckResult",
    "ControlParams",
    "FIGURE_IDS",
    "FidelityBreakdown",
    "MeasurementPair",
    "OptResult",
    "OptimizationConfig",
    "PipelineTrace",
    "SHOWCASE_POINT",
    "StatePair",
    "SweepRecord",
    "baselines",
    "beta_critical",
    "bloch_length",
    "check_density_matrix",
    "control_map",
    "correction",
    "curve_over_p",
    "dagger",
    "dephase",
    "eta_opt",
    "eta_terms",
    "fidelity_closed",
    "fidelity_eta_opt",
    "fidelity_phi0",
    "fidelity_simulated",
    "figure_dataset",
    "frame_rotation",
    "from_bloch",
    "optimize_point",
    "overlap",
    "pauli",
    "pipeline_trace",
    "prepare_pair",
    "purity",
    "render_csv",
    "render_json",
    "rotated_frame_check",
    "run_checks",
    "snapshot_closed_forms",
    "state_eigenvalues",
    "sweep_surface",
    "to_bloch",
    "unit_lattice",
    "weak_measurements",
    "write_text",
    "__version__",
]
