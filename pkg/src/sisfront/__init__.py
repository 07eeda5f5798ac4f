"""Numerical laboratory for a one-dimensional SIS epidemic model with
advection and two free boundaries of Stefan type."""

from .dynamics import Outcome, classify, estimate_speeds, find_mu_star, verify_attractor
from .errors import (
    BracketError,
    ExpressionError,
    InconclusiveProbeError,
    InvariantViolation,
    NumericError,
    SisFrontError,
    StepFailure,
    ValidationError,
    WindowError,
)
from .frontfix import FrontFixSolver, Grid, Snapshot, SolverOptions, Trajectory, run, stefan_velocity
from .model import ModelSpec, bulk_rates, constant_example, reference_example, validate
from .semiwave import SemiWaveResult, semiwave_slope, speed, speeds
from .spectral import (
    SpectralResult,
    analyze_interval,
    principal_eigenvalue,
    r0_dirichlet_advection,
    r0_free_series,
    r0_properties_probe,
    threshold_diffusion,
)
from .steady import EquilibriumProfile, solve_equilibrium

__version__ = "0.1.0"
