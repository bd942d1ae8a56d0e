"""Structure-preserving finite element solver for Cahn-Hilliard type models."""

from ._core import (
    CSV_HEADER,
    ConfigError,
    Error,
    InvalidMeshSize,
    IoError,
    MaterialLaws,
    Mesh,
    RunConfig,
    SingularMatrixError,
    StepFailure,
    alpha,
    check,
    cli,
    dg_potential,
    dg_potential_db,
    double_well,
    double_well_prime,
    eta,
    initial_phi,
    mobility,
    parse_config,
    preset_config,
    run,
    splitmix64,
)

__all__ = [
    "CSV_HEADER",
    "ConfigError",
    "Error",
    "InvalidMeshSize",
    "IoError",
    "MaterialLaws",
    "Mesh",
    "RunConfig",
    "SingularMatrixError",
    "StepFailure",
    "alpha",
    "check",
    "cli",
    "dg_potential",
    "dg_potential_db",
    "double_well",
    "double_well_prime",
    "eta",
    "initial_phi",
    "mobility",
    "parse_config",
    "preset_config",
    "run",
    "splitmix64",
]
