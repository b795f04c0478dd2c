"""Integration driver: startup, local PECE loop, controller supervision,
history management, statistics, and solution assembly.

One run advances across N global intervals of width dt = t_end / N.  Inside
each interval the controller-owned local step h is used; the steps-to-go
counter s and h together always measure the exact remaining time, so global
nodes are landed on exactly.  The first local step of a run (and of any
interval whose history had to be discarded) is taken by the family's
one-step startup method; every other step uses the family's two-step PECE
pair.  The startup step is error-controlled like any other step.

A run is strictly sequential and touches only its own state, so independent
problems can be integrated concurrently from separate threads.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .control import (
    EPS_FLOOR,
    TOL_RANGE,
    ControllerState,
    StepDecision,
    apply_decision,
    decide_step,
    hermite_eval,
    initial_step_size,
    pi_scale_factor,
    round_half_up,
    truncation_error,
)
from .core import (
    DynamicProblem,
    FirstOrderProblem,
    HistoryWindow,
    KinematicProblem,
    NodeRecord,
    RunStatistics,
    SolutionSeries,
    StepUnderflowError,
    euclidean_norm,
)
from .steppers import (
    CorrectorVariant,
    StepResult,
    eval_acceleration,
    eval_velocity,
    heun_start,
    pece_dynamic_step,
    pece_first_order_step,
    pece_second_order_step,
    startup_dynamic,
    startup_second_order,
)

__all__ = [
    "IntegrationConfig",
    "integrate",
    "ConvergenceResult",
    "convergence_study",
    "startup_order_probe",
]

Problem = Union[FirstOrderProblem, KinematicProblem, DynamicProblem]

# Local steps smaller than dt * 2^-40 indicate a pathological callback;
# the run aborts with a diagnostic rather than grinding on.
UNDERFLOW_FACTOR = 2.0 ** -40


@dataclass
class IntegrationConfig:
    """Run options.

    ``fixed_step`` forces exactly that many equal local steps per global
    step and disables the controller entirely.  ``m`` repeats the
    correct/evaluate pair (PE(CE)^m); one pass is normally sufficient when
    the step size is error-controlled.
    """

    tol: float = 1.0e-4
    m: int = 1
    variant: CorrectorVariant = CorrectorVariant.TYPE2
    fixed_step: Optional[int] = None

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.fixed_step is not None and self.fixed_step < 1:
            raise ValueError("fixed_step must be >= 1")
        if self.fixed_step is None and not (TOL_RANGE[0] <= self.tol <= TOL_RANGE[1]):
            warnings.warn(
                f"tolerance {self.tol:g} is outside the supported range "
                f"[{TOL_RANGE[0]:g}, {TOL_RANGE[1]:g}]; proceeding anyway",
                stacklevel=2,
            )


@dataclass(frozen=True)
class _Family:
    name: str
    p: int
    uses_accel: bool
    solves_velocity: bool
    startup: Callable[..., StepResult]
    pece: Callable[..., StepResult]


def _first_order_pece(problem, hist, variant, t_new, m):
    return pece_first_order_step(problem, hist, t_new, m)


def _kinematic_pece(problem, hist, variant, t_new, m):
    return pece_second_order_step(problem, hist, variant, t_new, m)


def _dynamic_pece(problem, hist, variant, t_new, m):
    return pece_dynamic_step(problem, hist, variant, t_new, m)


_FAMILIES = {
    FirstOrderProblem: _Family(
        "first-order", 2, False, False, heun_start, _first_order_pece
    ),
    KinematicProblem: _Family(
        "second-order", 3, True, False, startup_second_order, _kinematic_pece
    ),
    DynamicProblem: _Family(
        "dynamic", 3, True, True, startup_dynamic, _dynamic_pece
    ),
}


def _family_of(problem: Problem) -> _Family:
    try:
        return _FAMILIES[type(problem)]
    except KeyError:
        raise TypeError(f"unsupported problem type {type(problem)!r}") from None


def _initial_record(fam: _Family, problem: Problem) -> NodeRecord:
    x0 = problem.x0
    if fam.solves_velocity:
        v0 = problem.v0
        a0 = eval_acceleration(problem, 0.0, x0, v0)
        return NodeRecord(0.0, x0, v0, a0)
    v0 = eval_velocity(problem, 0.0, x0)
    a0 = eval_acceleration(problem, 0.0, x0, v0) if fam.uses_accel else None
    return NodeRecord(0.0, x0, v0, a0)


def _node_from_result(fam: _Family, result: StepResult) -> NodeRecord:
    if fam.solves_velocity:
        return NodeRecord(result.t_new, result.x_corr, result.v_corr, result.a_new)
    return NodeRecord(result.t_new, result.x_corr, result.v_new, result.a_new)


def _error_estimate(fam: _Family, result: StepResult) -> float:
    eps = truncation_error(result.x_corr, result.x_pred)
    if fam.solves_velocity:
        eps = max(eps, truncation_error(result.v_corr, result.v_pred))
    return eps


def _interp_record(
    fam: _Family,
    problem: Problem,
    a: NodeRecord,
    b: NodeRecord,
    h: float,
    theta: float,
) -> NodeRecord:
    """Record at t_a + theta*h on the bracket [a, b].

    Solved fields are interpolated with the cubic Hermite rule; prescribed
    fields are re-evaluated from their callbacks at the interpolated state.
    """
    t = b.t - (1.0 - theta) * h
    x = hermite_eval(a.x, b.x, a.v, b.v, h, theta)
    if fam.solves_velocity:
        v = hermite_eval(a.v, b.v, a.a, b.a, h, theta)
        return NodeRecord(t, x, v, eval_acceleration(problem, t, x, v))
    v = eval_velocity(problem, t, x)
    if fam.uses_accel:
        return NodeRecord(t, x, v, eval_acceleration(problem, t, x, v))
    return NodeRecord(t, x, v, None)


def integrate(problem: Problem, config: Optional[IntegrationConfig] = None) -> SolutionSeries:
    """Integrate ``problem`` over [0, t_end], reporting n_global + 1 nodes.

    Raises :class:`pece.core.StepUnderflowError` if repeated halvings drive
    the local step below dt * 2^-40, and propagates callback evaluation
    failures with their location on the solution path.
    """
    config = config if config is not None else IntegrationConfig()
    fam = _family_of(problem)
    n_nodes = problem.n_global
    nodes = np.linspace(0.0, problem.t_end, n_nodes + 1)
    dt = problem.t_end / n_nodes

    front = _initial_record(fam, problem)
    xs = np.empty((n_nodes + 1, problem.dimension))
    xs[0] = front.x
    vs: Optional[np.ndarray] = None
    if fam.solves_velocity:
        vs = np.empty_like(xs)
        vs[0] = front.v

    stats = RunStatistics()
    trace: list[tuple[float, float, float]] = []
    h_min = dt * UNDERFLOW_FACTOR

    ctrl: Optional[ControllerState] = None
    if config.fixed_step is None:
        h, steps = initial_step_size(problem, dt)
        ctrl = ControllerState(tol=config.tol, dt=dt, p=fam.p, h=h, s=steps)

    hist: Optional[HistoryWindow] = None

    for k in range(n_nodes):
        t_right = nodes[k + 1]

        if ctrl is None:
            s = config.fixed_step
            h = dt / config.fixed_step
        else:
            # The local step count is redetermined at every global node.  If
            # the spacing changes, the previous node is re-gridded when that
            # is an interpolation; otherwise the history restarts.
            s = max(2, round_half_up(dt / ctrl.h))
            h_new = dt / s
            if hist is not None and h_new != ctrl.h:
                theta = 1.0 - h_new / ctrl.h
                if 0.0 <= theta <= 1.0:
                    hist.replace_prev(
                        _interp_record(fam, problem, hist.prev, hist.curr, ctrl.h, theta),
                        h_new,
                    )
                else:
                    hist = None
            ctrl.h = h_new
            ctrl.s = s
            h = h_new

        while s > 0:
            if ctrl is not None:
                h = ctrl.h
            t_next = t_right - (s - 1) * h
            if hist is None:
                result = fam.startup(problem, front, h, t_next, config.m)
            else:
                result = fam.pece(problem, hist, config.variant, t_next, config.m)
            eps = _error_estimate(fam, result)

            decision: Optional[StepDecision] = None
            if ctrl is not None:
                scale = pi_scale_factor(eps, ctrl)
                ctrl.s = s - 1  # steps left beyond the step under review
                decision = decide_step(scale, eps, ctrl)
                if decision is StepDecision.HALVE_REDO:
                    # A rejected one-step startup attempt is step-size
                    # calibration: the initial-step heuristic targets
                    # resolution, not tolerance, so the driver finishes the
                    # job by halving until the startup passes.  Only a
                    # rejected two-step step counts as a restart.
                    if hist is None:
                        stats.halvings += 1
                    else:
                        stats.restarts += 1
                    apply_decision(ctrl, decision)
                    if ctrl.h < h_min:
                        raise StepUnderflowError(front.t, eps, ctrl.h)
                    if hist is not None:
                        half = _interp_record(fam, problem, hist.prev, hist.curr, h, 0.5)
                        hist.apply_halve(half)
                    s = ctrl.s
                    continue

            # Accepted: commit the node and pay for the step.
            stats.local_steps += 1
            trace.append((result.t_new, eps, h))
            new = _node_from_result(fam, result)
            if hist is None:
                hist = HistoryWindow(prev=front, curr=new, h=h)
            else:
                hist.advance(new)
            front = new
            s -= 1

            if ctrl is not None:
                ctrl.eps_prev = max(eps, EPS_FLOOR)
                ctrl.s = s
                if decision is StepDecision.DOUBLE:
                    # Doubling additionally needs the node two steps back;
                    # without it the step is simply maintained.
                    if hist.can_double():
                        apply_decision(ctrl, decision)
                        hist.apply_double()
                        stats.doublings += 1
                        s = ctrl.s
                elif decision is StepDecision.HALVE_CONTINUE:
                    apply_decision(ctrl, decision)
                    if ctrl.h < h_min:
                        raise StepUnderflowError(front.t, eps, ctrl.h)
                    half = _interp_record(fam, problem, hist.prev, hist.curr, h, 0.5)
                    hist.apply_halve(half)
                    stats.halvings += 1
                    s = ctrl.s

        xs[k + 1] = front.x
        if vs is not None:
            vs[k + 1] = front.v

    trace_arr = np.array(trace) if trace else np.zeros((0, 3))
    return SolutionSeries(t=nodes, x=xs, v=vs, stats=stats, error_trace=trace_arr)


@dataclass(frozen=True)
class ConvergenceResult:
    """(h, global error) samples and the fitted log-log slope."""

    h: np.ndarray
    errors: np.ndarray
    slope: float

    def table(self) -> list[tuple[float, float]]:
        return list(zip(self.h.tolist(), self.errors.tolist()))


def _fit_slope(hs: Sequence[float], errs: Sequence[float]) -> float:
    if len(hs) < 2 or len(set(hs)) < 2:
        raise ValueError("degenerate step grid: need at least two distinct h values")
    logs_h = np.log(np.asarray(hs))
    logs_e = np.log(np.maximum(np.asarray(errs), 1.0e-300))
    return float(np.polyfit(logs_h, logs_e, 1)[0])


def convergence_study(
    analytic,
    h_values: Sequence[float],
    variant: CorrectorVariant = CorrectorVariant.TYPE2,
    m: int = 1,
) -> ConvergenceResult:
    """Measure the global-error slope on a problem with a closed form.

    Each requested h is snapped to an integer number of local steps per
    global step and run with the controller disabled; the error is taken at
    t_end in the Euclidean norm.
    """
    problem = analytic.problem
    dt = problem.t_end / problem.n_global
    hs: list[float] = []
    errs: list[float] = []
    for h in h_values:
        if h <= 0.0:
            raise ValueError("step sizes must be positive")
        steps = max(1, round_half_up(dt / h))
        cfg = IntegrationConfig(variant=variant, m=m, fixed_step=steps)
        sol = integrate(problem, cfg)
        hs.append(dt / steps)
        errs.append(euclidean_norm(sol.x[-1] - analytic.exact_x(problem.t_end)))
    return ConvergenceResult(np.array(hs), np.array(errs), _fit_slope(hs, errs))


def startup_order_probe(
    analytic,
    h_values: Sequence[float],
    m: int = 1,
) -> ConvergenceResult:
    """Local-order probe: a single startup step at each h from t = 0."""
    problem = analytic.problem
    fam = _family_of(problem)
    start = _initial_record(fam, problem)
    hs: list[float] = []
    errs: list[float] = []
    for h in h_values:
        if h <= 0.0:
            raise ValueError("step sizes must be positive")
        result = fam.startup(problem, start, h, None, m)
        hs.append(h)
        errs.append(euclidean_norm(result.x_corr - analytic.exact_x(h)))
    return ConvergenceResult(np.array(hs), np.array(errs), _fit_slope(hs, errs))
