"""Fractional Noether theorem toolkit: Riemann-Liouville operators on uniform grids,
fractional optimal-control problems, Pontryagin extremals and conservation-law checks."""

from .errors import (
    ConstraintViolation,
    FracNoetherError,
    GridMismatch,
    NodeSolveError,
    NonConvergence,
    NotAutonomous,
    OrderOutOfRange,
    UnsupportedGenerator,
)
from .fracdiff import (
    Grid,
    SampledPath,
    frac_pair_operator,
    gl_weights,
    left_rl_deriv,
    power_law_deriv,
    right_rl_deriv,
    rl_integral,
)
from .model import (
    REGISTRY,
    ControlProblem,
    Generators,
    Hamiltonian,
    cov_as_control,
    get_problem,
    make_hamiltonian,
    state_translation,
    time_translation,
)
from .noether import (
    ConservationLaw,
    InvarianceResult,
    VerificationReport,
    autonomous_invariant,
    check_invariance,
    invariant_value,
    lagrangian_noether_law,
    noether_law,
    verify_conservation,
)
from .solver import (
    PontryaginTriple,
    SolverConfig,
    euler_lagrange_residual,
    hamiltonian_residual,
    solve_pontryagin,
    stationary_control,
)

__version__ = "0.1.0"
