"""Liquid-vapor interface conditions, saturation thermodynamics, and dryout location."""

from .eos import (
    CriticalPoint,
    EosModel,
    ThermoPoint,
    ThermoState,
    critical_point,
    d2_volume_helmholtz_mod,
    entropy,
    helmholtz,
    ideal_gas,
    internal_energy_and_heat,
    modified_quantities,
    pressure,
    reduced_van_der_waals,
    state_point,
    volume_helmholtz,
)
from .interface import (
    InterfaceSolution,
    JumpInputs,
    f_jacobian,
    f_system,
    jump_residuals,
    max_flux_scan,
    sign_changes_modified,
    solve_interface,
)
from .numerics import (
    EnvelopeSegment,
    RootConfig,
    fd_gradient,
    fd_second,
    find_root_bracketed,
    lower_convex_envelope,
    newton2d,
)
from .saturation import (
    SaturationPoint,
    boiling_temperature,
    clausius_clapeyron_residual,
    latent_heat,
    maxwell_construction,
    saturation_curve,
)
from .stefan import (
    DryoutSolution,
    FreeBoundaryProblem,
    StefanInputs,
    canonical_reduction,
    dryout_condition,
    solve_free_boundary,
    solve_stationary,
    temperature_profiles,
    xhat_critical,
    z0_of_xhat,
)

__version__ = "0.1.0"
