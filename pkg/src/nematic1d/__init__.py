"""1D compressible nematic liquid-crystal flow: a dissipative sine-Galerkin /
Lagrangian solver, an independent finite-difference oracle, and diagnostics
that turn the model's a-priori bounds into runtime checks."""

from .coefficients import (DerivedViscosities, DissipationMatrix,
                           InvalidCoefficients, LeslieSet, ValidationReport,
                           derive_viscosities, dissipation_matrix, example_set,
                           inverse_dissipation_matrix, random_valid_set,
                           validate)
from .fields import (FlowState, FluxPair, Grid1D, director_residual,
                     elastic_coupling, leslie_fluxes, pressure)
from .galerkin import (SolverConfig, SpectralVelocity, Trajectory,
                       project_initial_velocity)
from .harness import RunConfig, mollify_initial_data, parse_config, run_simulation

__all__ = [
    "DerivedViscosities", "DissipationMatrix", "InvalidCoefficients",
    "LeslieSet", "ValidationReport", "derive_viscosities",
    "dissipation_matrix", "example_set", "inverse_dissipation_matrix",
    "random_valid_set", "validate",
    "FlowState", "FluxPair", "Grid1D", "director_residual",
    "elastic_coupling", "leslie_fluxes", "pressure",
    "SolverConfig", "SpectralVelocity", "Trajectory",
    "project_initial_velocity",
    "RunConfig", "mollify_initial_data", "parse_config", "run_simulation",
]

__version__ = "0.1.0"
