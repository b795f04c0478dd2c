"""Adaptive two-step PECE integrators for first- and second-order ODEs.

The package pairs explicit BDF2-shaped predictors with implicit-in-form
correctors applied in predict/evaluate/correct/evaluate sequence, started
by compatible one-step methods and supervised by a PI step-size controller
that only ever doubles or halves the local step.  A companion stencil
module verifies every formula's polynomial exactness in exact rational
arithmetic.
"""

from .core import (
    DynamicProblem,
    EvaluationError,
    FirstOrderProblem,
    HistoryWindow,
    InvalidStateError,
    KinematicProblem,
    NodeRecord,
    RunStatistics,
    SolutionSeries,
    StepUnderflowError,
    as_state,
    euclidean_norm,
)
from .control import (
    ControllerState,
    StepDecision,
    decide_step,
    hermite_eval,
    initial_step_size,
    pi_scale_factor,
    truncation_error,
)
from .driver import (
    ConvergenceResult,
    IntegrationConfig,
    convergence_study,
    integrate,
    startup_order_probe,
)
from .steppers import CorrectorVariant, StepResult
from .stencil import (
    CATALOGUE,
    InfeasibilityReport,
    Stencil,
    TaylorResidual,
    exactness_degree,
    solve_weights,
    taylor_residual,
)
from . import problems

__version__ = "0.1.0"

__all__ = [
    "DynamicProblem",
    "EvaluationError",
    "FirstOrderProblem",
    "HistoryWindow",
    "InvalidStateError",
    "KinematicProblem",
    "NodeRecord",
    "RunStatistics",
    "SolutionSeries",
    "StepUnderflowError",
    "as_state",
    "euclidean_norm",
    "ControllerState",
    "StepDecision",
    "decide_step",
    "hermite_eval",
    "initial_step_size",
    "pi_scale_factor",
    "truncation_error",
    "ConvergenceResult",
    "IntegrationConfig",
    "convergence_study",
    "integrate",
    "startup_order_probe",
    "CorrectorVariant",
    "StepResult",
    "CATALOGUE",
    "InfeasibilityReport",
    "Stencil",
    "TaylorResidual",
    "exactness_degree",
    "solve_weights",
    "taylor_residual",
    "problems",
    "__version__",
]
