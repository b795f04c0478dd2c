"""Local error estimation and step-size control.

The controller works with two step sizes.  The global step dt spaces the
reported output nodes; the local step h is what the integrator actually
advances by, with s counting the local steps still to go before the next
output node.  After every completed local step the controller computes a
scale factor C and takes one of four actions: double h, keep it, halve it,
or halve it and repeat the step.  Only doublings and halvings are admitted,
which keeps the s*h budget exact and prevents controller wind-up.

Bookkeeping convention: ``ControllerState.s`` counts the steps remaining
*after* the step under review, so accepting a step and decrementing the
counter happen together in the driver.  With that convention every decision
preserves the remaining-time product exactly:

    double          s*h -> (s/2)(2h)
    maintain        s*h -> s*h
    halve-continue  s*h -> (2s)(h/2)
    halve-redo      (s+1)*h -> (2s+2)(h/2)   measured from the redo node
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import (
    DynamicProblem,
    FirstOrderProblem,
    InvalidStateError,
    KinematicProblem,
    euclidean_norm,
)

__all__ = [
    "EPS_FLOOR",
    "TOL_RANGE",
    "ControllerState",
    "StepDecision",
    "truncation_error",
    "pi_scale_factor",
    "decide_step",
    "apply_decision",
    "hermite_eval",
    "initial_step_size",
    "round_half_up",
]

# Error estimates are floored here before they enter any ratio, so a
# predictor/corrector pair that agrees to the bit cannot divide by zero.
EPS_FLOOR = 10.0 * float(np.finfo(float).tiny)

TOL_RANGE = (1.0e-8, 1.0e-2)


class StepDecision(enum.Enum):
    DOUBLE = "double"
    MAINTAIN = "maintain"
    HALVE_CONTINUE = "halve-continue"
    HALVE_REDO = "halve-redo"


@dataclass
class ControllerState:
    """Mutable per-run controller memory.

    ``p`` is the method order (local error O(h^(p+1))): 2 for the
    first-order family, 3 for the kinematic and dynamic families.
    ``eps_prev`` starts at 1 so the first decision runs on the plain
    integral controller.
    """

    tol: float
    dt: float
    p: int
    h: float
    s: int
    eps_prev: float = 1.0

    def __post_init__(self):
        if not (TOL_RANGE[0] <= self.tol <= TOL_RANGE[1]):
            warnings.warn(
                f"tolerance {self.tol:g} is outside the supported range "
                f"[{TOL_RANGE[0]:g}, {TOL_RANGE[1]:g}]",
                stacklevel=3,
            )
        if self.dt <= 0.0 or self.h <= 0.0:
            raise ValueError("dt and h must be positive")
        if self.s < 0:
            raise ValueError("steps-to-go must be nonnegative")

    def remaining(self) -> float:
        return self.s * self.h


def truncation_error(x_corr: np.ndarray, x_pred: np.ndarray) -> float:
    """Normalized predictor/corrector discrepancy,
    ||x_corr - x_pred|| / max(1, ||x_corr||)."""
    xc = np.asarray(x_corr, dtype=float)
    xp = np.asarray(x_pred, dtype=float)
    if xc.shape != xp.shape:
        raise InvalidStateError("corrected and predicted states differ in dimension")
    return euclidean_norm(xc - xp) / max(1.0, euclidean_norm(xc))


def pi_scale_factor(eps_next: float, state: ControllerState) -> float:
    """Step scale factor C = h_new / h_old from the controller.

    While both the previous and the current error sit below tolerance the
    proportional-integral form is used, with gains 0.3/(p+1) on the integral
    loop and 0.4/(p+1) on the proportional loop (so the current-error factor
    carries exponent 0.7/(p+1)).  Otherwise control falls back to the plain
    integral law C = (tol/eps)^(1/p), which shrinks the step whenever the
    error exceeds tolerance.
    """
    tol, p = state.tol, state.p
    eps = max(float(eps_next), EPS_FLOOR)
    if state.eps_prev < tol and eps < tol:
        return (tol / eps) ** (0.7 / (p + 1)) * (state.eps_prev / tol) ** (0.4 / (p + 1))
    return (tol / eps) ** (1.0 / p)


def decide_step(C: float, eps_next: float, state: ControllerState) -> StepDecision:
    """Classify a completed step.

    ``state.s`` is the post-step count of steps remaining.  Doubling needs
    headroom (s > 3) and an even count so the remaining budget re-grids
    exactly; when those conditions fail a large C simply maintains the step.
    """
    if C < 1.0:
        return (
            StepDecision.HALVE_REDO
            if eps_next > state.tol
            else StepDecision.HALVE_CONTINUE
        )
    if C > 2.0 and state.s > 3 and state.s % 2 == 0:
        return StepDecision.DOUBLE
    return StepDecision.MAINTAIN


def apply_decision(state: ControllerState, decision: StepDecision) -> None:
    """Mutate (h, s) for the chosen decision; see the module docstring for
    the exact budget each update preserves."""
    if decision is StepDecision.DOUBLE:
        state.h = 2.0 * state.h
        state.s = state.s // 2
    elif decision is StepDecision.HALVE_CONTINUE:
        state.h = 0.5 * state.h
        state.s = 2 * state.s
    elif decision is StepDecision.HALVE_REDO:
        state.h = 0.5 * state.h
        state.s = 2 * state.s + 2
    # MAINTAIN leaves both untouched: the consumed step was already paid for.


def hermite_eval(
    x_a: np.ndarray,
    x_b: np.ndarray,
    v_a: np.ndarray,
    v_b: np.ndarray,
    h: float,
    theta: float,
    allow_slight_extrapolation: bool = False,
) -> np.ndarray:
    """Cubic Hermite value at t_a + theta*h on a bracket of width h.

    Exact for polynomials through degree 3.  At theta = 1/2 this reduces to
    (x_a + x_b)/2 - (h/8)(v_b - v_a), the half-step rule used when a step is
    halved.  theta is confined to [0, 1]; values slightly above 1 are only
    admitted when the caller explicitly flags a re-grid fallback.
    """
    upper = 1.5 if allow_slight_extrapolation else 1.0
    if not (0.0 <= theta <= upper):
        raise ValueError(f"theta={theta!r} outside the permitted range [0, {upper}]")
    t2 = theta * theta
    t3 = t2 * theta
    h00 = 2.0 * t3 - 3.0 * t2 + 1.0
    h10 = t3 - 2.0 * t2 + theta
    h01 = -2.0 * t3 + 3.0 * t2
    h11 = t3 - t2
    return h00 * x_a + h10 * h * v_a + h01 * x_b + h11 * h * v_b


def round_half_up(value: float) -> int:
    """Deterministic rounding for step counts: halves round up."""
    return int(math.floor(value + 0.5))


def initial_step_size(problem, dt: float) -> tuple[float, int]:
    """Automatic choice of the starting local step.

    A crude first guess h0 = ||x0|| / ||v0|| is clamped into
    [dt/100, dt/10]; one Euler-predict/trapezoid-correct probe step at h0
    then yields the refined estimate

        h1 = 2 |(||x1|| - ||x0||) / (||v1|| + ||v0||)|,

    clamped below by dt/1000.  The returned step divides the global step
    into S = max(2, round(dt/h1)) pieces, at least two local steps per
    global step.  Vanishing velocities fall back to the clamp boundaries.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    lo, hi = dt / 100.0, dt / 10.0

    x0 = problem.x0
    if isinstance(problem, (FirstOrderProblem, KinematicProblem)):
        v0 = np.asarray(problem.velocity_fn(0.0, x0), dtype=float)
    elif isinstance(problem, DynamicProblem):
        v0 = problem.v0
    else:
        raise TypeError(f"unsupported problem type {type(problem)!r}")

    n_x0 = euclidean_norm(x0)
    n_v0 = euclidean_norm(v0)
    h0 = hi if n_v0 == 0.0 else min(max(n_x0 / n_v0, lo), hi)

    # One Euler + trapezoid probe.  For Newton's-law problems the velocity
    # advances by Euler/trapezoid on the prescribed acceleration.
    if isinstance(problem, DynamicProblem):
        a0 = np.asarray(problem.acceleration_fn(0.0, x0, v0), dtype=float)
        xp = x0 + h0 * v0
        vp = v0 + h0 * a0
        ap = np.asarray(problem.acceleration_fn(h0, xp, vp), dtype=float)
        x1 = x0 + 0.5 * h0 * (vp + v0)
        v1 = v0 + 0.5 * h0 * (ap + a0)
    else:
        xp = x0 + h0 * v0
        vp = np.asarray(problem.velocity_fn(h0, xp), dtype=float)
        x1 = x0 + 0.5 * h0 * (vp + v0)
        v1 = np.asarray(problem.velocity_fn(h0, x1), dtype=float)

    denom = euclidean_norm(v1) + n_v0
    if denom == 0.0:
        h1 = dt / 10.0
    else:
        h1 = 2.0 * abs(euclidean_norm(x1) - n_x0) / max(denom, EPS_FLOOR)
    h1 = max(h1, dt / 1000.0)

    S = max(2, round_half_up(dt / h1))
    return dt / S, S
