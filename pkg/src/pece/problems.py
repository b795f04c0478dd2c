"""Benchmark problem catalogue.

Three groups live here:

* the Brusselator reaction model, whose parameters switch it between a
  limit-cycle response and a strongly stiff asymptotic decay;
* a three-degree-of-freedom vehicle ride model (heave, pitch, roll of a
  small open-wheel race car) excited by a bumpy roadway; and
* closed-form analytic problems used as convergence oracles.

Named presets at the bottom wire these into ready-to-run problems.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .core import (
    DynamicProblem,
    FirstOrderProblem,
    KinematicProblem,
    as_state,
)

__all__ = [
    "BrusselatorParams",
    "brusselator_rhs",
    "brusselator_eigenvalues",
    "stiffness_ratio",
    "brusselator_problem",
    "RoadwayProfile",
    "VehicleParams",
    "fsae_vitals",
    "vehicle_matrices",
    "roadway_excitation",
    "vehicle_forcing",
    "vehicle_acceleration",
    "vehicle_static_ic",
    "vehicle_problem",
    "AnalyticProblem",
    "exp_decay",
    "harmonic_oscillator",
    "forced_linear",
    "BENCHMARK_ICS",
    "PRESET_NAMES",
    "build_preset",
]

STANDARD_GRAVITY_FPS2 = 32.174
FEET_PER_MILE = 5280.0
SECONDS_PER_HOUR = 3600.0


# ---------------------------------------------------------------------------
# Brusselator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BrusselatorParams:
    """Two-species autocatalytic reaction with feed rates ``a`` and ``b``.

    The unique fixed point sits at (a, b/a).  For a=1, b=3 every orbit not
    starting on the fixed point approaches a limit cycle; for a=100, b=3
    the fixed-point Jacobian has eigenvalue magnitudes near 1 and 10^4 and
    the system is stiff.
    """

    a: float
    b: float
    y0: np.ndarray

    def __post_init__(self):
        if not (self.a > 0.0 and math.isfinite(self.a)):
            raise ValueError("a must be finite and positive")
        if not (self.b > 0.0 and math.isfinite(self.b)):
            raise ValueError("b must be finite and positive")
        object.__setattr__(self, "y0", as_state(self.y0))
        if self.y0.size != 2:
            raise ValueError("y0 must be a 2-vector")


def brusselator_rhs(params: BrusselatorParams, t: float, y: np.ndarray) -> np.ndarray:
    """dy1/dt = a + y1^2 y2 - (b+1) y1,  dy2/dt = b y1 - y1^2 y2."""
    y1, y2 = y[0], y[1]
    coupling = y1 * y1 * y2
    return np.array(
        [params.a + coupling - (params.b + 1.0) * y1, params.b * y1 - coupling]
    )


def brusselator_eigenvalues(params: BrusselatorParams) -> tuple[complex, complex]:
    """Eigenvalues of the fixed-point Jacobian.

    The characteristic polynomial has trace b - 1 - a^2 and determinant a^2,
    giving lambda = ( -(1 - b + a^2) +/- sqrt((1 - b + a^2)^2 - 4 a^2) ) / 2
    with a complex square root when the discriminant is negative.
    """
    q = 1.0 - params.b + params.a * params.a
    root = cmath.sqrt(q * q - 4.0 * params.a * params.a)
    return (0.5 * (-q + root), 0.5 * (-q - root))


def stiffness_ratio(eigenvalues: tuple[complex, complex]) -> float:
    """|lambda|_max / |lambda|_min; ratios beyond about 10 flag stiffness."""
    mags = sorted(abs(ev) for ev in eigenvalues)
    if mags[0] == 0.0:
        raise ValueError("stiffness ratio undefined for a zero eigenvalue")
    return mags[1] / mags[0]


def brusselator_problem(
    params: BrusselatorParams, t_end: float, n_global: int
) -> FirstOrderProblem:
    def velocity(t: float, y: np.ndarray) -> np.ndarray:
        return brusselator_rhs(params, t, y)

    return FirstOrderProblem(velocity, params.y0, t_end, n_global)


# ---------------------------------------------------------------------------
# Vehicle ride model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RoadwayProfile:
    """A train of raised-cosine bumps, measured normal to a smooth road.

    The profile is (amplitude/2) * (1 - cos(2 pi xi / wavelength)) over
    ``wave_count`` wavelengths and zero outside, so height and slope both
    vanish at the segment ends.  Wheels sample it at road coordinate
    xi = speed * t - offset; rear wheels trail by the wheelbase and the
    passenger side lags the driver side by ``side_lag_fraction`` of the
    wheelbase.
    """

    amplitude: float
    wavelength: float
    speed: float
    wave_count: int = 5
    side_lag_fraction: float = 0.1

    def height_and_slope(self, xi) -> tuple[np.ndarray, np.ndarray]:
        xi = np.asarray(xi, dtype=float)
        span = self.wave_count * self.wavelength
        inside = (xi >= 0.0) & (xi <= span)
        phase = 2.0 * math.pi * xi / self.wavelength
        height = np.where(inside, 0.5 * self.amplitude * (1.0 - np.cos(phase)), 0.0)
        slope = np.where(
            inside,
            (math.pi * self.amplitude / self.wavelength) * np.sin(phase),
            0.0,
        )
        return height, slope


@dataclass(frozen=True)
class VehicleParams:
    """Heave/pitch/roll ride parameters in consistent ft-lb-s units.

    Suspension corners are numbered 1 driver front, 2 passenger front,
    3 passenger rear, 4 driver rear, matching the sign pattern of the
    damping/stiffness matrices.  Use :meth:`from_shop_units` to enter spring
    and damper rates in the lbs/in and lbs/(in/s) figures they are usually
    quoted in; lengths are axle-to-CG distances and half-tracks in feet.
    """

    mass: float
    pitch_inertia: float
    roll_inertia: float
    dampers: tuple[float, float, float, float]
    springs: tuple[float, float, float, float]
    l_front: float
    l_rear: float
    rho_front: float
    rho_rear: float
    roadway: RoadwayProfile
    gravity: float = STANDARD_GRAVITY_FPS2

    def __post_init__(self):
        for label, value in (
            ("mass", self.mass),
            ("pitch_inertia", self.pitch_inertia),
            ("roll_inertia", self.roll_inertia),
            ("l_front", self.l_front),
            ("l_rear", self.l_rear),
            ("rho_front", self.rho_front),
            ("rho_rear", self.rho_rear),
        ):
            if not value > 0.0:
                raise ValueError(f"{label} must be positive")
        if any(c < 0.0 for c in self.dampers) or any(k < 0.0 for k in self.springs):
            raise ValueError("damper and spring rates must be nonnegative")

    @classmethod
    def from_shop_units(
        cls,
        *,
        mass_slugs: float,
        pitch_inertia: float,
        roll_inertia: float,
        dampers_lbs_per_in_s: tuple[float, float, float, float],
        springs_lbs_per_in: tuple[float, float, float, float],
        l_front_ft: float,
        l_rear_ft: float,
        rho_front_ft: float,
        rho_rear_ft: float,
        roadway: RoadwayProfile,
        gravity: float = STANDARD_GRAVITY_FPS2,
    ) -> "VehicleParams":
        # 12 in/ft converts per-inch rates to per-foot.
        return cls(
            mass=mass_slugs,
            pitch_inertia=pitch_inertia,
            roll_inertia=roll_inertia,
            dampers=tuple(12.0 * c for c in dampers_lbs_per_in_s),
            springs=tuple(12.0 * k for k in springs_lbs_per_in),
            l_front=l_front_ft,
            l_rear=l_rear_ft,
            rho_front=rho_front_ft,
            rho_rear=rho_rear_ft,
            roadway=roadway,
            gravity=gravity,
        )

    @property
    def wheelbase(self) -> float:
        return self.l_front + self.l_rear

    @property
    def weight(self) -> float:
        return self.mass * self.gravity


def fsae_vitals(
    amplitude_in: float = 1.0,
    speed_mph: float = 10.0,
) -> VehicleParams:
    """A typical small formula-style race car with driver.

    14 slugs all-up, front springs 150 lbs/in and dampers 10 lbs/(in/s),
    rears 300 lbs/in and 15 lbs/(in/s), 5 ft wheelbase.  The roadway is a
    five-wave bump train at one wheelbase wavelength; its amplitude is not
    standardized, so it is a parameter with a one-inch default.
    """
    wheelbase = 3.2 + 1.8
    speed_fps = speed_mph * FEET_PER_MILE / SECONDS_PER_HOUR
    roadway = RoadwayProfile(
        amplitude=amplitude_in / 12.0,
        wavelength=wheelbase,
        speed=speed_fps,
    )
    return VehicleParams.from_shop_units(
        mass_slugs=14.0,
        pitch_inertia=45.0,
        roll_inertia=20.0,
        dampers_lbs_per_in_s=(10.0, 10.0, 15.0, 15.0),
        springs_lbs_per_in=(150.0, 150.0, 300.0, 300.0),
        l_front_ft=3.2,
        l_rear_ft=1.8,
        rho_front_ft=2.1,
        rho_rear_ft=2.0,
        roadway=roadway,
    )


def vehicle_matrices(p: VehicleParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Assemble the mass, damping, and stiffness matrices (3x3, symmetric)."""
    m = np.diag([p.mass, p.pitch_inertia, p.roll_inertia])
    if np.any(np.diag(m) <= 0.0):
        raise ValueError("mass matrix must have a positive diagonal")

    def second_order(r1: float, r2: float, r3: float, r4: float) -> np.ndarray:
        front_sum, rear_sum = r1 + r2, r3 + r4
        front_diff, rear_diff = r1 - r2, r3 - r4
        lf, lr, rf, rr = p.l_front, p.l_rear, p.rho_front, p.rho_rear
        off_pitch = -front_sum * lf + rear_sum * lr
        off_roll = -front_diff * rf + rear_diff * rr
        cross = front_diff * lf * rf + rear_diff * lr * rr
        return np.array(
            [
                [front_sum + rear_sum, off_pitch, off_roll],
                [off_pitch, front_sum * lf * lf + rear_sum * lr * lr, cross],
                [off_roll, cross, front_sum * rf * rf + rear_sum * rr * rr],
            ]
        )

    c = second_order(*p.dampers)
    k = second_order(*p.springs)
    return m, c, k


def _wheel_coordinates(p: VehicleParams, t: float) -> np.ndarray:
    # Wheel 1 meets the bump train at t = 0; wheel order matches the
    # suspension numbering (DF, PF, PR, DR).
    wb = p.wheelbase
    lag = p.roadway.side_lag_fraction * wb
    offsets = np.array([0.0, lag, wb + lag, wb])
    return p.roadway.speed * t - offsets


def roadway_excitation(p: VehicleParams, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Road heights R_i and vertical velocities Rdot_i under the four wheels."""
    xi = _wheel_coordinates(p, t)
    height, slope = p.roadway.height_and_slope(xi)
    return height, slope * p.roadway.speed


def vehicle_forcing(p: VehicleParams, t: float) -> np.ndarray:
    """Generalized force vector (heave, pitch, roll) from weight plus road input."""
    r, rdot = roadway_excitation(p, t)
    c1, c2, c3, c4 = p.dampers
    k1, k2, k3, k4 = p.springs
    lf, lr, rf, rr = p.l_front, p.l_rear, p.rho_front, p.rho_rear
    heave = p.weight - (
        c1 * rdot[0] + c2 * rdot[1] + c3 * rdot[2] + c4 * rdot[3]
        + k1 * r[0] + k2 * r[1] + k3 * r[2] + k4 * r[3]
    )
    pitch = (
        (c1 * rdot[0] + c2 * rdot[1] + k1 * r[0] + k2 * r[1]) * lf
        - (c3 * rdot[2] + c4 * rdot[3] + k3 * r[2] + k4 * r[3]) * lr
    )
    roll = (
        (c1 * rdot[0] - c2 * rdot[1] + k1 * r[0] - k2 * r[1]) * rf
        - (c3 * rdot[2] - c4 * rdot[3] + k3 * r[2] - k4 * r[3]) * rr
    )
    return np.array([heave, pitch, roll])


def vehicle_acceleration(
    p: VehicleParams, t: float, x: np.ndarray, v: np.ndarray
) -> np.ndarray:
    """Solve M a = f(t) - C v - K x for the diagonal mass matrix."""
    m, c, k = vehicle_matrices(p)
    diag = np.diag(m)
    return (vehicle_forcing(p, t) - c @ v - k @ x) / diag


def vehicle_static_ic(p: VehicleParams) -> tuple[np.ndarray, np.ndarray]:
    """Rest on a smooth road: K x0 = (w, 0, 0) and v0 = 0.

    With equal side-to-side rates the roll column of K decouples, so the
    static roll offset is exactly zero while heave and pitch are not.
    """
    _, _, k = vehicle_matrices(p)
    f0 = np.array([p.weight, 0.0, 0.0])
    try:
        x0 = np.linalg.solve(k, f0)
    except np.linalg.LinAlgError as exc:
        raise ValueError("stiffness matrix is singular") from exc
    return x0, np.zeros(3)


def vehicle_problem(
    p: VehicleParams, t_end: float = 4.0, n_global: int = 500
) -> DynamicProblem:
    """Build the Newton's-law problem with matrices assembled once."""
    m, c, k = vehicle_matrices(p)
    diag = np.diag(m).copy()
    x0, v0 = vehicle_static_ic(p)

    def acceleration(t: float, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        return (vehicle_forcing(p, t) - c @ v - k @ x) / diag

    return DynamicProblem(acceleration, x0, v0, t_end, n_global)


# ---------------------------------------------------------------------------
# Analytic convergence oracles
# ---------------------------------------------------------------------------

ProblemUnion = Union[FirstOrderProblem, KinematicProblem, DynamicProblem]


@dataclass(frozen=True)
class AnalyticProblem:
    """A problem bundled with its closed-form solution callbacks."""

    name: str
    problem: ProblemUnion
    exact_x: Callable[[float], np.ndarray]
    exact_v: Optional[Callable[[float], np.ndarray]] = None


def exp_decay(
    family: str = "first-order",
    x0: float = 1.0,
    t_end: float = 1.0,
    n_global: int = 10,
) -> AnalyticProblem:
    """dx/dt = -x, exact solution x0 * exp(-t)."""
    start = np.array([float(x0)])

    def velocity(t, x):
        return -x

    def acceleration(t, x, v):
        return -v

    def exact_x(t):
        return start * math.exp(-t)

    def exact_v(t):
        return -start * math.exp(-t)

    if family == "first-order":
        prob: ProblemUnion = FirstOrderProblem(velocity, start, t_end, n_global)
    elif family == "second-order":
        prob = KinematicProblem(velocity, acceleration, start, t_end, n_global)
    elif family == "dynamic":
        prob = DynamicProblem(acceleration, start, -start, t_end, n_global)
    else:
        raise ValueError(f"unknown family {family!r}")
    return AnalyticProblem("exp-decay", prob, exact_x, exact_v)


def harmonic_oscillator(
    t_end: float = 2.0 * math.pi,
    n_global: int = 100,
) -> AnalyticProblem:
    """a = -x from (x, v) = (1, 0); exact solution (cos t, -sin t).

    Velocity is not a state function here, so only the Newton's-law family
    applies.
    """

    def acceleration(t, x, v):
        return -x

    x0 = np.array([1.0])
    v0 = np.array([0.0])

    def exact_x(t):
        return np.array([math.cos(t)])

    def exact_v(t):
        return np.array([-math.sin(t)])

    prob = DynamicProblem(acceleration, x0, v0, t_end, n_global)
    return AnalyticProblem("harmonic", prob, exact_x, exact_v)


def forced_linear(
    family: str = "first-order",
    x0: float = 0.0,
    t_end: float = 2.0,
    n_global: int = 10,
) -> AnalyticProblem:
    """dx/dt = -x + sin(t); exact (x0 + 1/2) e^{-t} + (sin t - cos t)/2."""
    c0 = float(x0) + 0.5

    def velocity(t, x):
        return -x + math.sin(t)

    def acceleration(t, x, v):
        return -v + math.cos(t)

    def exact_x(t):
        return np.array([c0 * math.exp(-t) + 0.5 * (math.sin(t) - math.cos(t))])

    def exact_v(t):
        return np.array([-c0 * math.exp(-t) + 0.5 * (math.cos(t) + math.sin(t))])

    start = np.array([float(x0)])
    if family == "first-order":
        prob: ProblemUnion = FirstOrderProblem(velocity, start, t_end, n_global)
    elif family == "second-order":
        prob = KinematicProblem(velocity, acceleration, start, t_end, n_global)
    elif family == "dynamic":
        prob = DynamicProblem(acceleration, start, exact_v(0.0), t_end, n_global)
    else:
        raise ValueError(f"unknown family {family!r}")
    return AnalyticProblem("forced-linear", prob, exact_x, exact_v)


ANALYTIC_BUILDERS = {
    "exp-decay": exp_decay,
    "harmonic": harmonic_oscillator,
    "forced-linear": forced_linear,
}


# ---------------------------------------------------------------------------
# Named presets
# ---------------------------------------------------------------------------

# Initial conditions exercised by the Brusselator benchmark runs.
BENCHMARK_ICS: tuple[tuple[float, float], ...] = (
    (0.1, 0.1),
    (1.5, 3.0),
    (2.0, 0.5),
    (3.25, 2.5),
)

PRESET_NAMES = ("brusselator-limit-cycle", "brusselator-stiff", "fsae-bumps")


def build_preset(
    name: str,
    ic: Optional[tuple[float, float]] = None,
    t_end: Optional[float] = None,
    n_global: Optional[int] = None,
    amplitude_in: float = 1.0,
    speed_mph: float = 10.0,
) -> ProblemUnion:
    """Instantiate a named benchmark problem.

    ``ic`` selects the Brusselator initial condition (default (1.5, 3.0));
    the vehicle preset ignores it and always starts from static equilibrium.
    """
    if name == "brusselator-limit-cycle":
        params = BrusselatorParams(1.0, 3.0, np.array(ic if ic else (1.5, 3.0)))
        return brusselator_problem(
            params, t_end if t_end else 20.0, n_global if n_global else 200
        )
    if name == "brusselator-stiff":
        params = BrusselatorParams(100.0, 3.0, np.array(ic if ic else (1.5, 3.0)))
        return brusselator_problem(
            params, t_end if t_end else 0.1, n_global if n_global else 100
        )
    if name == "fsae-bumps":
        vitals = fsae_vitals(amplitude_in=amplitude_in, speed_mph=speed_mph)
        return vehicle_problem(
            vitals, t_end if t_end else 4.0, n_global if n_global else 500
        )
    raise KeyError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
