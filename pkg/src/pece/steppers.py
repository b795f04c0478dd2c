"""Concrete PECE steppers: one-step startups and two-step BDF2-shaped pairs.

Every stepper runs the same sequence: predict, evaluate derivatives at the
prediction, correct, and re-evaluate at the correction, so the derivatives
returned in a :class:`StepResult` always belong to the corrected state.
Setting ``m > 1`` repeats the correct/evaluate pair, giving PE(CE)^m.

Three families are covered:

* first order      - Heun startup, then explicit predictor + BDF2 corrector;
* kinematic        - velocity and acceleration both prescribed; startup is a
                     Taylor step with a jerk-corrected trapezoid, the two-step
                     pair carries acceleration weights;
* dynamic          - Newton's-law problems; displacement and velocity advance
                     as a coupled predictor/corrector pair.

The two-step correctors with acceleration weights come in three printed
variants (type1, type2, averaged).  Their nodal weights are catalogued and
order-checked in :mod:`pece.stencil`; type2 is the only one whose measured
exactness matches the advertised local order, which is why callers default
to it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    DynamicProblem,
    EvaluationError,
    FirstOrderProblem,
    HistoryWindow,
    KinematicProblem,
    NodeRecord,
)

__all__ = [
    "CorrectorVariant",
    "StepResult",
    "eval_velocity",
    "eval_acceleration",
    "heun_start",
    "pece_first_order_step",
    "startup_second_order",
    "pece_second_order_step",
    "startup_dynamic",
    "pece_dynamic_step",
]


class CorrectorVariant(enum.Enum):
    """Printed corrector choices for the acceleration-weighted families."""

    AVERAGED = "averaged"
    TYPE1 = "type1"
    TYPE2 = "type2"


@dataclass
class StepResult:
    """One completed PECE step.

    ``x_pred``/``x_corr`` are the predicted and corrected displacements; the
    controller forms its error estimate from their difference, so both are
    always returned.  ``v_new``/``a_new`` are derivatives re-evaluated at the
    corrected state.  For the dynamic family, ``v_pred``/``v_corr`` carry the
    solved velocity pair as well.
    """

    t_new: float
    x_pred: np.ndarray
    x_corr: np.ndarray
    v_new: Optional[np.ndarray] = None
    a_new: Optional[np.ndarray] = None
    v_pred: Optional[np.ndarray] = None
    v_corr: Optional[np.ndarray] = None


def eval_velocity(problem, t: float, x: np.ndarray) -> np.ndarray:
    out = np.asarray(problem.velocity_fn(t, x), dtype=float)
    if out.shape != x.shape or not np.all(np.isfinite(out)):
        raise EvaluationError(t, x, "velocity")
    return out


def eval_acceleration(problem, t: float, x: np.ndarray, v: np.ndarray) -> np.ndarray:
    out = np.asarray(problem.acceleration_fn(t, x, v), dtype=float)
    if out.shape != x.shape or not np.all(np.isfinite(out)):
        raise EvaluationError(t, x, "acceleration")
    return out


def _check_step(h: float) -> None:
    if not h > 0.0:
        raise ValueError("step size must be positive")


def heun_start(
    problem: FirstOrderProblem,
    start: NodeRecord,
    h: float,
    t_new: Optional[float] = None,
    m: int = 1,
) -> StepResult:
    """Forward-Euler predictor with a trapezoidal corrector."""
    _check_step(h)
    t1 = start.t + h if t_new is None else t_new
    xp = start.x + h * start.v
    v = eval_velocity(problem, t1, xp)
    xc = xp
    for _ in range(m):
        xc = start.x + 0.5 * h * (v + start.v)
        v = eval_velocity(problem, t1, xc)
    return StepResult(t_new=t1, x_pred=xp, x_corr=xc, v_new=v)


def pece_first_order_step(
    problem: FirstOrderProblem,
    history: HistoryWindow,
    t_new: Optional[float] = None,
    m: int = 1,
) -> StepResult:
    """Two-step explicit predictor paired with the BDF2 corrector."""
    h = history.h
    n, p = history.curr, history.prev
    t1 = n.t + h if t_new is None else t_new
    base = (4.0 * n.x - p.x) / 3.0
    xp = base + (2.0 * h / 3.0) * (2.0 * n.v - p.v)
    v = eval_velocity(problem, t1, xp)
    xc = xp
    for _ in range(m):
        xc = base + (2.0 * h / 3.0) * v
        v = eval_velocity(problem, t1, xc)
    return StepResult(t_new=t1, x_pred=xp, x_corr=xc, v_new=v)


def startup_second_order(
    problem: KinematicProblem,
    start: NodeRecord,
    h: float,
    t_new: Optional[float] = None,
    m: int = 1,
) -> StepResult:
    """Taylor predictor with a jerk-corrected trapezoidal corrector.

    The acceleration difference term raises the corrector to degree-4
    polynomial exactness, one order beyond the plain trapezoid.
    """
    _check_step(h)
    if start.a is None:
        raise ValueError("startup requires acceleration at the start node")
    t1 = start.t + h if t_new is None else t_new
    xp = start.x + h * start.v + 0.5 * h * h * start.a
    v = eval_velocity(problem, t1, xp)
    a = eval_acceleration(problem, t1, xp, v)
    xc = xp
    for _ in range(m):
        xc = start.x + 0.5 * h * (v + start.v) - (h * h / 12.0) * (a - start.a)
        v = eval_velocity(problem, t1, xc)
        a = eval_acceleration(problem, t1, xc, v)
    return StepResult(t_new=t1, x_pred=xp, x_corr=xc, v_new=v, a_new=a)


def _accel_corrected_x(
    variant: CorrectorVariant,
    base: np.ndarray,
    h: float,
    vp: np.ndarray,
    ap: np.ndarray,
    n: NodeRecord,
    p: NodeRecord,
) -> np.ndarray:
    # Weights per printed variant; vp/ap are the latest evaluations at the
    # newest estimate (the prediction on the first pass).
    if variant is CorrectorVariant.TYPE2:
        return (
            base
            + (h / 36.0) * (-vp + 22.0 * n.v + 3.0 * p.v)
            + (h * h / 36.0) * (2.0 * ap + 27.0 * n.a - p.a)
        )
    if variant is CorrectorVariant.TYPE1:
        return (
            base
            + (h / 9.0) * (vp + 5.0 * n.v)
            + (2.0 * h * h / 9.0) * (ap + 3.0 * n.a)
        )
    if variant is CorrectorVariant.AVERAGED:
        return (
            base
            + (h / 24.0) * (vp + 14.0 * n.v + p.v)
            + (h * h / 72.0) * (10.0 * ap + 51.0 * n.a - p.a)
        )
    raise ValueError(f"unknown corrector variant {variant!r}")


def pece_second_order_step(
    problem: KinematicProblem,
    history: HistoryWindow,
    variant: CorrectorVariant = CorrectorVariant.TYPE2,
    t_new: Optional[float] = None,
    m: int = 1,
) -> StepResult:
    """Two-step pair with acceleration weights, velocity prescribed."""
    h = history.h
    n, p = history.curr, history.prev
    if n.a is None or p.a is None:
        raise ValueError("history must carry accelerations")
    t1 = n.t + h if t_new is None else t_new
    base = (4.0 * n.x - p.x) / 3.0
    xp = (
        base
        + (h / 6.0) * (3.0 * n.v + p.v)
        + (h * h / 36.0) * (31.0 * n.a - p.a)
    )
    v = eval_velocity(problem, t1, xp)
    a = eval_acceleration(problem, t1, xp, v)
    xc = xp
    for _ in range(m):
        xc = _accel_corrected_x(variant, base, h, v, a, n, p)
        v = eval_velocity(problem, t1, xc)
        a = eval_acceleration(problem, t1, xc, v)
    return StepResult(t_new=t1, x_pred=xp, x_corr=xc, v_new=v, a_new=a)


def startup_dynamic(
    problem: DynamicProblem,
    start: NodeRecord,
    h: float,
    t_new: Optional[float] = None,
    m: int = 1,
) -> StepResult:
    """Paired startup for Newton's-law problems.

    Displacement takes a Taylor step corrected as in the kinematic startup;
    velocity takes a forward-Euler step with a trapezoidal correction.
    """
    _check_step(h)
    if start.a is None:
        raise ValueError("startup requires acceleration at the start node")
    t1 = start.t + h if t_new is None else t_new
    xp = start.x + h * start.v + 0.5 * h * h * start.a
    vp = start.v + h * start.a
    a = eval_acceleration(problem, t1, xp, vp)
    xc, vc, v_in = xp, vp, vp
    for _ in range(m):
        xc = start.x + 0.5 * h * (v_in + start.v) - (h * h / 12.0) * (a - start.a)
        vc = start.v + 0.5 * h * (a + start.a)
        a = eval_acceleration(problem, t1, xc, vc)
        v_in = vc
    return StepResult(
        t_new=t1, x_pred=xp, x_corr=xc, v_new=None, a_new=a, v_pred=vp, v_corr=vc
    )


def pece_dynamic_step(
    problem: DynamicProblem,
    history: HistoryWindow,
    variant: CorrectorVariant = CorrectorVariant.TYPE2,
    t_new: Optional[float] = None,
    m: int = 1,
) -> StepResult:
    """Coupled two-step pair advancing displacement and velocity together.

    The velocity pair reuses the BDF2-shaped stencils with accelerations in
    place of velocities; the displacement corrector is variant-selected.
    """
    h = history.h
    n, p = history.curr, history.prev
    if n.a is None or p.a is None:
        raise ValueError("history must carry accelerations")
    t1 = n.t + h if t_new is None else t_new
    base_x = (4.0 * n.x - p.x) / 3.0
    base_v = (4.0 * n.v - p.v) / 3.0
    xp = (
        base_x
        + (h / 6.0) * (3.0 * n.v + p.v)
        + (h * h / 36.0) * (31.0 * n.a - p.a)
    )
    vp = base_v + (2.0 * h / 3.0) * (2.0 * n.a - p.a)
    a = eval_acceleration(problem, t1, xp, vp)
    xc, vc, v_in = xp, vp, vp
    for _ in range(m):
        xc = _accel_corrected_x(variant, base_x, h, v_in, a, n, p)
        vc = base_v + (2.0 * h / 3.0) * a
        a = eval_acceleration(problem, t1, xc, vc)
        v_in = vc
    return StepResult(
        t_new=t1, x_pred=xp, x_corr=xc, v_new=None, a_new=a, v_pred=vp, v_corr=vc
    )
