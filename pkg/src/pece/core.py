"""Shared numeric types for the two-step PECE integration toolkit.

State is carried in plain 1-D numpy arrays of float64.  This module holds
no integration logic: it defines the three problem classes (velocity given,
velocity and acceleration given, acceleration only given), the two-node
solver memory, and the containers a completed run hands back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "InvalidStateError",
    "EvaluationError",
    "StepUnderflowError",
    "VelocityFn",
    "AccelerationFn",
    "as_state",
    "euclidean_norm",
    "FirstOrderProblem",
    "KinematicProblem",
    "DynamicProblem",
    "NodeRecord",
    "HistoryWindow",
    "RunStatistics",
    "SolutionSeries",
]

# Velocity callbacks map (t, x) -> dx/dt; acceleration callbacks map
# (t, x, v) -> dv/dt.  Both must be deterministic: equal inputs, equal outputs.
VelocityFn = Callable[[float, np.ndarray], np.ndarray]
AccelerationFn = Callable[[float, np.ndarray, np.ndarray], np.ndarray]


class InvalidStateError(ValueError):
    """A state vector contains NaN or infinity, or has the wrong shape."""


class EvaluationError(RuntimeError):
    """A user callback returned a non-finite value.

    Carries the evaluation time and the state it was called with so the
    failure can be located on the solution path.
    """

    def __init__(self, t: float, x: np.ndarray, detail: str = ""):
        self.t = float(t)
        self.x = np.array(x, dtype=float, copy=True)
        msg = f"callback returned a non-finite value at t={t!r}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class StepUnderflowError(RuntimeError):
    """Repeated halvings drove the local step below the underflow bound."""

    def __init__(self, t: float, eps: float, h: float):
        self.t = float(t)
        self.eps = float(eps)
        self.h = float(h)
        super().__init__(
            f"local step underflow at t={t!r}: h={h!r} after repeated "
            f"halvings (last error estimate {eps!r})"
        )


def as_state(values) -> np.ndarray:
    """Coerce ``values`` to a finite 1-D float64 array of dimension >= 1."""
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.ndim != 1 or arr.size < 1:
        raise InvalidStateError(f"state must be a 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidStateError("state contains NaN or infinity")
    return arr


def euclidean_norm(x) -> float:
    """Return sqrt(sum(x_i^2)).

    This is the norm used everywhere a magnitude is needed: truncation
    errors, the initial step-size heuristic, and acceptance distances.
    The sum is scaled by the largest entry so the result is zero only for
    the zero vector, never through underflow.  Raises
    :class:`InvalidStateError` on non-finite input.
    """
    arr = np.asarray(x, dtype=float).ravel()
    if not np.all(np.isfinite(arr)):
        raise InvalidStateError("norm of a non-finite vector")
    scale = float(np.max(np.abs(arr))) if arr.size else 0.0
    if scale == 0.0:
        return 0.0
    scaled = arr / scale
    return scale * float(math.sqrt(float(np.dot(scaled, scaled))))


@dataclass(frozen=True)
class FirstOrderProblem:
    """dx/dt = v(t, x) with initial displacement ``x0``.

    ``n_global`` output nodes are reported over [0, t_end].
    """

    velocity_fn: VelocityFn
    x0: np.ndarray
    t_end: float
    n_global: int

    def __post_init__(self):
        object.__setattr__(self, "x0", as_state(self.x0))
        if not self.t_end > 0.0:
            raise ValueError("t_end must be positive")
        if int(self.n_global) < 1:
            raise ValueError("n_global must be >= 1")
        object.__setattr__(self, "n_global", int(self.n_global))

    @property
    def dimension(self) -> int:
        return self.x0.size


@dataclass(frozen=True)
class KinematicProblem:
    """Both v(t, x) and a(t, x, v) are prescribed; displacement is solved."""

    velocity_fn: VelocityFn
    acceleration_fn: AccelerationFn
    x0: np.ndarray
    t_end: float
    n_global: int

    def __post_init__(self):
        object.__setattr__(self, "x0", as_state(self.x0))
        if not self.t_end > 0.0:
            raise ValueError("t_end must be positive")
        if int(self.n_global) < 1:
            raise ValueError("n_global must be >= 1")
        object.__setattr__(self, "n_global", int(self.n_global))

    @property
    def dimension(self) -> int:
        return self.x0.size


@dataclass(frozen=True)
class DynamicProblem:
    """Newton's-law form: only a(t, x, v) is prescribed.

    Displacement and velocity are both solved, so two initial conditions
    are required and they must have equal dimension.
    """

    acceleration_fn: AccelerationFn
    x0: np.ndarray
    v0: np.ndarray
    t_end: float
    n_global: int

    def __post_init__(self):
        object.__setattr__(self, "x0", as_state(self.x0))
        object.__setattr__(self, "v0", as_state(self.v0))
        if self.x0.size != self.v0.size:
            raise InvalidStateError("x0 and v0 must have equal dimension")
        if not self.t_end > 0.0:
            raise ValueError("t_end must be positive")
        if int(self.n_global) < 1:
            raise ValueError("n_global must be >= 1")
        object.__setattr__(self, "n_global", int(self.n_global))

    @property
    def dimension(self) -> int:
        return self.x0.size


@dataclass
class NodeRecord:
    """Solution data at one local node: time, displacement, velocity,
    and (for the second-order families) acceleration."""

    t: float
    x: np.ndarray
    v: np.ndarray
    a: Optional[np.ndarray] = None


@dataclass
class HistoryWindow:
    """Two-step solver memory: nodes n-1 and n, one local step ``h`` apart.

    ``spare`` optionally holds the node two local steps back; it is what
    makes a step doubling possible without extrapolation.  The window
    maintains t_curr - t_prev == h (re-gridding restores this after any
    resize) and, when the spare is present, t_curr - t_spare == 2h.
    """

    prev: NodeRecord
    curr: NodeRecord
    h: float
    spare: Optional[NodeRecord] = None

    def advance(self, new: NodeRecord) -> None:
        """Rotate after an accepted step: n-1 <- n and n <- n+1.

        The displaced n-1 record becomes the spare, which is exactly 2h
        behind the new front because both retained steps were taken at h.
        """
        self.spare = self.prev
        self.prev = self.curr
        self.curr = new

    def can_double(self) -> bool:
        return self.spare is not None

    def apply_double(self) -> None:
        """Re-grid for a doubled step: the spare becomes the previous node."""
        if self.spare is None:
            raise ValueError("doubling requires a valid spare record")
        self.prev = self.spare
        self.spare = None
        self.h = 2.0 * self.h

    def apply_halve(self, half_node: NodeRecord) -> None:
        """Re-grid for a halved step.

        ``half_node`` must be the interpolated record at t_curr - h/2.  The
        displaced previous node sits exactly 2*(h/2) behind the front, so it
        is retained as a valid spare.
        """
        self.spare = self.prev
        self.prev = half_node
        self.h = 0.5 * self.h

    def replace_prev(self, node: NodeRecord, new_h: float) -> None:
        """Re-grid to an arbitrary new spacing (global-node adjustment).

        Invalidates the spare: the retained records no longer prove two
        consecutive equal steps at the new spacing.
        """
        self.prev = node
        self.spare = None
        self.h = float(new_h)


@dataclass
class RunStatistics:
    """Counts accumulated over one integration run.

    ``local_steps`` counts accepted steps only.  A rejected two-step step is
    counted in ``restarts`` and repeated; ``halvings`` counts every other
    halving of the local step, including startup-calibration retries.
    """

    local_steps: int = 0
    halvings: int = 0
    doublings: int = 0
    restarts: int = 0

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.local_steps, self.halvings, self.doublings, self.restarts)


@dataclass
class SolutionSeries:
    """Output of one integration run.

    ``t`` holds the N+1 global node times (uniform spacing t_end/N), ``x``
    the displacement rows, and ``v`` the velocity rows for Newton's-law
    runs (None otherwise).  ``error_trace`` has one row (t, eps, h) per
    accepted local step.
    """

    t: np.ndarray
    x: np.ndarray
    v: Optional[np.ndarray]
    stats: RunStatistics = field(default_factory=RunStatistics)
    error_trace: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))

    @property
    def final_x(self) -> np.ndarray:
        return self.x[-1]

    @property
    def final_v(self) -> Optional[np.ndarray]:
        return None if self.v is None else self.v[-1]
