"""Second-order entropy stable finite volume solver for 2D scalar
conservation laws, with entropy-budget diagnostics and refinement studies."""

from .diagnostics import (
    ConvergenceRow,
    EntropyLedger,
    ResidualTracker,
    dissipation_increment,
    discrete_entropy_flux,
    entropy_residual,
    l1_error,
    observed_order,
    weak_bv_report,
)
from .entropy import (
    EntropyPair,
    FluxSpec,
    burgers_flux,
    entropy_variable,
    linear_flux,
    make_flux,
    smoothed_kruzkov_pair,
    square_entropy_pair,
)
from .flux import (
    DiffusionBounds,
    NumericalFluxField,
    assemble_tecno_flux,
    diffusion_coefficient,
    entropy_conservative_flux,
)
from .grid import (
    Boundary,
    Grid2D,
    GridFunction,
    apply_boundary,
    interface_average,
    interface_jump,
    project_initial_data,
)
from .problems import ProblemSpec, burgers_riemann_x, get_problem, registry
from .reconstruct import (
    EdgeValues,
    ReconJump,
    check_cube_inequality,
    check_sign_property,
    eno2_edge_values,
    eno2_slopes,
    recon_jump,
    reconstruction_jumps,
)
from .solver import (
    RunResult,
    SolverConfig,
    SolverState,
    run,
    semidiscrete_rhs,
    ssprk2_step,
    stable_timestep,
)

__version__ = "0.1.0"

__all__ = [
    "Boundary",
    "ConvergenceRow",
    "DiffusionBounds",
    "EdgeValues",
    "EntropyLedger",
    "EntropyPair",
    "FluxSpec",
    "Grid2D",
    "GridFunction",
    "NumericalFluxField",
    "ProblemSpec",
    "ReconJump",
    "ResidualTracker",
    "RunResult",
    "SolverConfig",
    "SolverState",
    "apply_boundary",
    "assemble_tecno_flux",
    "burgers_flux",
    "burgers_riemann_x",
    "check_cube_inequality",
    "check_sign_property",
    "diffusion_coefficient",
    "discrete_entropy_flux",
    "dissipation_increment",
    "eno2_edge_values",
    "eno2_slopes",
    "entropy_conservative_flux",
    "entropy_residual",
    "entropy_variable",
    "get_problem",
    "interface_average",
    "interface_jump",
    "l1_error",
    "linear_flux",
    "make_flux",
    "observed_order",
    "project_initial_data",
    "recon_jump",
    "reconstruction_jumps",
    "registry",
    "run",
    "semidiscrete_rhs",
    "smoothed_kruzkov_pair",
    "square_entropy_pair",
    "ssprk2_step",
    "stable_timestep",
    "weak_bv_report",
]
