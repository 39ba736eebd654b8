"""Generalized trapezoidal time integration for an SDOF system with an
implicit Bingham/Norton dashpot."""

from .analysis import (
    ConvergenceReport,
    ErrorReport,
    GridMismatch,
    convergence_study,
    dissipated_energy_total,
    energy_balance_residual,
    error_norm,
)
from .config import ParseError, ValidationError, parse_config, preset, render_config
from .constitutive import DashpotParams, SystemParams, invert_phi, phi, phi_derivative
from .integrator import (
    IntegratorParams,
    State,
    StepDiagnostics,
    discrete_residuals,
    initialize,
    predictor,
    solve_dashpot_linear,
    solve_dashpot_nonlinear,
    step,
)
from .rootfind import NoBracket, NotConverged, RootResult, SolverControls, solve_bracketed
from .simulate import (
    ForcingSpec,
    NotCommensurate,
    RunConfig,
    StepFailure,
    Trajectory,
    eval_forcing,
    run,
    run_benchmark,
)

__version__ = "0.1.0"
