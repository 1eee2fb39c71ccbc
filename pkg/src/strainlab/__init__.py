"""Pseudo-spectral laboratory for strain-formulated incompressible flow.

The package evolves the symmetric velocity-gradient field of a periodic
3D flow under a one-parameter family of model equations, and verifies at
desk scale the exact identities, closed forms and growth envelopes that
the strain formulation satisfies.
"""

from .config import ConfigError, RunConfig, load_config, parse_config, render_config
from .diagnostics import (
    DiagnosticsRecord,
    blowup_report,
    compute_record,
    det_integral,
    enstrophy_rate,
    gronwall_check,
    identity_suite,
    inf_rho_halpha,
    inf_rho_l2,
    inf_rho_lq,
    reference_constants,
    regularity_integrands,
    riccati_envelope,
)
from .nonlinearity import compute_terms, mu_rhs, q_perturbation
from .operators import (
    curl,
    divergence,
    grad,
    heat_semigroup,
    laplacian,
    leray_project,
    strain_from_vorticity,
    strain_project,
    sym_grad,
    velocity_from_strain,
    vorticity_from_strain,
)
from .persistence import (
    SnapshotError,
    read_diagnostics_csv,
    read_field_snapshot,
    read_state_snapshot,
    write_diagnostics_csv,
    write_field_snapshot,
    write_state_snapshot,
)
from .seeds import (
    amplified_blowup_seed,
    random_band_strain,
    random_solenoidal_velocity,
    taylor_green_strain,
    taylor_green_velocity,
)
from .solver import (
    InitialSpec,
    NumericalFailure,
    RunResult,
    SimConfig,
    SimState,
    blowup_monitor,
    build_initial,
    existence_time_bounds,
    picard_fixed_point,
    run,
    step,
)
from .spectral import (
    Grid3,
    ScalarField,
    SpectralError,
    TensorField,
    VectorField,
    alias_free_product,
    band_limit,
    from_physical,
    inner_product,
    lq_norm,
    sobolev_norm_sq,
    to_physical,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DiagnosticsRecord",
    "Grid3",
    "InitialSpec",
    "NumericalFailure",
    "RunConfig",
    "RunResult",
    "ScalarField",
    "SimConfig",
    "SimState",
    "SnapshotError",
    "SpectralError",
    "TensorField",
    "VectorField",
    "alias_free_product",
    "amplified_blowup_seed",
    "band_limit",
    "blowup_monitor",
    "blowup_report",
    "build_initial",
    "compute_record",
    "compute_terms",
    "curl",
    "det_integral",
    "divergence",
    "enstrophy_rate",
    "existence_time_bounds",
    "from_physical",
    "grad",
    "gronwall_check",
    "heat_semigroup",
    "identity_suite",
    "inf_rho_halpha",
    "inf_rho_l2",
    "inf_rho_lq",
    "inner_product",
    "laplacian",
    "leray_project",
    "load_config",
    "lq_norm",
    "mu_rhs",
    "parse_config",
    "picard_fixed_point",
    "q_perturbation",
    "random_band_strain",
    "random_solenoidal_velocity",
    "read_diagnostics_csv",
    "read_field_snapshot",
    "read_state_snapshot",
    "reference_constants",
    "regularity_integrands",
    "render_config",
    "riccati_envelope",
    "run",
    "sobolev_norm_sq",
    "step",
    "strain_from_vorticity",
    "strain_project",
    "sym_grad",
    "taylor_green_strain",
    "taylor_green_velocity",
    "to_physical",
    "velocity_from_strain",
    "vorticity_from_strain",
    "write_diagnostics_csv",
    "write_field_snapshot",
    "write_state_snapshot",
]
