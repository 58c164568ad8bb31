"""Approximation schemes and convergence studies for doubly perturbed SDEs.

The state is perturbed by alpha times its running maximum and beta times
its running minimum; coefficients may be Lipschitz or concave-modulus
regular.  The package provides delay-based (Caratheodory) approximation
schemes built on running-extrema representations, a closed-form-case
reference solver for the limit equation, a Skorohod reflection map, and a
deterministic Monte Carlo harness for strong-convergence studies.
"""

from .driver import (
    BrownianDriver,
    LagMap,
    SimGrid,
    brownian_values,
    coarsen_increments,
    coarsen_values,
    generate_increments,
    lag_map,
    make_grid,
)
from .errors import (
    AlphaOutOfRange,
    BetaOutOfRange,
    DegenerateFit,
    DelayNotAligned,
    DelayTooFine,
    DPSDEError,
    EmptyInput,
    InvalidGrid,
    NegativeInput,
    NegativeStart,
    NonPositiveHorizon,
    RhoTooLarge,
)
from .experiments import (
    ConvergenceReport,
    ErrorEstimate,
    MomentEstimate,
    RateFit,
    SchemeComparison,
    StudySpec,
    compare_schemes,
    default_study,
    moment_scan,
    path_sup_gaps,
    rate_fit,
    run_convergence,
    strong_error,
)
from .models import (
    CoefficientModel,
    Lipschitz,
    Modulus,
    Rho1,
    Rho2,
    builtin_catalog,
    eval_modulus,
    get_model,
    verify_regularity,
)
from .params import PerturbationParams, beyond_mao, validate
from .reference import (
    MaxSide,
    MinSide,
    ReferencePath,
    exact_singly_perturbed,
    solve_reference,
)
from .reflect import running_max, running_min, skorohod_map
from .scheme import (
    SchemePath,
    phi_step,
    simulate_general_x0,
    simulate_new,
    simulate_old,
)

__version__ = "0.1.0"
