"""Closed-form neural trial solutions for ODE boundary/initial-value problems.

The trial solution is the sum of a condition-matching term and a projected
network term, built so the prescribed boundary or initial conditions hold
exactly for any parameter values.  The package provides the matching
operators for Dirichlet, mixed, Neumann, Cauchy and Robin conditions (plus
first-order and system initial matches), a reduction of mixed/Robin
problems to parametric two-point form, derivative-free and quasi-Newton
trainers, a perturbation-based deviation bound, six benchmark problems, and
a reproducible experiment harness.
"""

from .net import EvalTriple, NetworkParams, random_init
from .grids import Grid, chebyshev, equidistant, test_grid
from .conditions import (
    Cauchy,
    Dirichlet,
    InitialValue,
    MatchParams,
    MixedDN,
    Neumann,
    Robin,
    SystemInitial,
    match_eval,
    reduce_mixed_to_dirichlet,
    reduce_robin_to_dirichlet,
    rigid_match_eval,
    robin_coeffs,
)
from .trial import (
    AUGMENTED,
    BASELINE,
    RIGID_REDUCED,
    NeuralForm,
    SystemForm,
    build_form,
    join_params,
    split_params,
    system_trial_eval,
    trial_eval,
)
from .problems import Problem, available, registry
from .optimize import OptConfig, OptResult, bfgs, fd_gradient, nelder_mead, pattern_search
from .train import TrainConfig, TrainResult, condition_violation, error_nf, error_penalty, train
from .bound import BoundResult, estimate_bound
from .metrics import (
    MetricsReport,
    deviation_metrics,
    estimated_deviation_metrics,
    residual_metrics,
)

__version__ = "0.1.0"
