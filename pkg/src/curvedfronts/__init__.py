"""Curved fronts of combustion reaction-diffusion equations: planar profiles,
polytope front geometry, smoothed interfaces, comparison barriers, explicit
solvers, and front diagnostics."""

from .nonlinearity import CombustionNonlinearity, make_combustion, gamma_star
from .wave_profile import (
    WaveProfile,
    ShootingCollapseError,
    build_profile,
    decay_rate_into_burned,
    find_wave_speed,
    ode_residual_sup,
    shoot_p,
    tail_rates,
)
from .front_geometry import (
    FrontConfiguration,
    symmetric_v,
    q_values,
    min_q,
    subsolution_lower,
    classify_region,
    boundary_distance,
    ridge_distance,
    interface_distance,
    spatial_ridge_distance,
    sample_interface,
)
from .hypersurface import ScaledSurface, SurfaceFit, fit_surface_constants
from .barriers import (
    BarrierParams,
    BarrierSampleSpec,
    BarrierSet,
    ValidationReport,
    auto_parameters,
    mollifier_omega,
    parabolic_residual,
    validate_parameters,
)
from .rd_solver import (
    Grid,
    Field,
    SolverConfig,
    make_boundary,
    subsolution_floor,
    step,
    solve_cauchy,
    entire_solution,
    EntireSolutionResult,
    measure_speed_1d,
    SpeedFit,
)
from .diagnostics import (
    DiagnosticsReport,
    PerturbationSpec,
    StabilityResult,
    check_admissibility,
    extract_interface_and_Meps,
    half_level_cross_check,
    interface_pair_distance,
    mean_speed_estimate,
    sandwich_and_monotonicity,
    stability_run,
    weighted_gap_report,
)
from .cli_io import read_snapshot, snapshot_roundtrip, write_snapshot

__all__ = [
    "CombustionNonlinearity",
    "make_combustion",
    "gamma_star",
    "WaveProfile",
    "ShootingCollapseError",
    "build_profile",
    "decay_rate_into_burned",
    "find_wave_speed",
    "ode_residual_sup",
    "shoot_p",
    "tail_rates",
    "FrontConfiguration",
    "symmetric_v",
    "q_values",
    "min_q",
    "subsolution_lower",
    "classify_region",
    "boundary_distance",
    "ridge_distance",
    "interface_distance",
    "spatial_ridge_distance",
    "sample_interface",
    "ScaledSurface",
    "SurfaceFit",
    "fit_surface_constants",
    "BarrierParams",
    "BarrierSampleSpec",
    "BarrierSet",
    "ValidationReport",
    "auto_parameters",
    "mollifier_omega",
    "parabolic_residual",
    "validate_parameters",
    "Grid",
    "Field",
    "SolverConfig",
    "make_boundary",
    "subsolution_floor",
    "step",
    "solve_cauchy",
    "entire_solution",
    "EntireSolutionResult",
    "measure_speed_1d",
    "SpeedFit",
    "DiagnosticsReport",
    "PerturbationSpec",
    "StabilityResult",
    "check_admissibility",
    "extract_interface_and_Meps",
    "half_level_cross_check",
    "interface_pair_distance",
    "mean_speed_estimate",
    "sandwich_and_monotonicity",
    "stability_run",
    "weighted_gap_report",
    "read_snapshot",
    "snapshot_roundtrip",
    "write_snapshot",
]

__version__ = "0.1.0"
