import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pece.problems import (
    BENCHMARK_ICS,
    BrusselatorParams,
    RoadwayProfile,
    VehicleParams,
    brusselator_eigenvalues,
    brusselator_problem,
    brusselator_rhs,
    build_preset,
    exp_decay,
    forced_linear,
    fsae_vitals,
    harmonic_oscillator,
    roadway_excitation,
    stiffness_ratio,
    vehicle_acceleration,
    vehicle_forcing,
    vehicle_matrices,
    vehicle_problem,
    vehicle_static_ic,
)

params_st = st.tuples(
    st.floats(min_value=0.1, max_value=100.0),
    st.floats(min_value=0.1, max_value=100.0),
)


# --- Brusselator ---------------------------------------------------------------

def test_rhs_fixed_point_examples():
    p = BrusselatorParams(1.0, 3.0, np.array([1.0, 3.0]))
    assert np.array_equal(brusselator_rhs(p, 0.0, np.array([1.0, 3.0])), [0.0, 0.0])
    got = brusselator_rhs(p, 0.0, np.array([2.0, 1.0]))
    assert np.array_equal(got, [-3.0, 2.0])


@given(params_st)
def test_rhs_vanishes_at_fixed_point(ab):
    a, b = ab
    p = BrusselatorParams(a, b, np.array([1.0, 1.0]))
    fp = np.array([a, b / a])
    rhs = brusselator_rhs(p, 0.0, fp)
    assert np.all(np.abs(rhs) <= 1e-12 * (1.0 + a * b))


def test_eigenvalues_limit_cycle_parameters():
    p = BrusselatorParams(1.0, 3.0, np.array([1.0, 1.0]))
    lam1, lam2 = brusselator_eigenvalues(p)
    assert lam1 == pytest.approx(0.5 * (1 + 1j * math.sqrt(3)), rel=1e-14)
    assert abs(lam1) == pytest.approx(1.0, rel=1e-14)
    assert abs(lam2) == pytest.approx(1.0, rel=1e-14)
    assert stiffness_ratio((lam1, lam2)) == pytest.approx(1.0, rel=1e-12)


def test_eigenvalues_stiff_parameters_against_root_oracle():
    p = BrusselatorParams(100.0, 3.0, np.array([1.0, 1.0]))
    got = sorted(brusselator_eigenvalues(p), key=lambda z: z.real)
    # independent route: roots of the characteristic polynomial
    q = 1.0 - p.b + p.a * p.a
    oracle = sorted(np.roots([1.0, q, p.a * p.a]), key=lambda z: z.real)
    for g, o in zip(got, oracle):
        assert g == pytest.approx(o, rel=1e-12)
    assert got[0].real == pytest.approx(-9996.9997, abs=1e-3)
    assert got[1].real == pytest.approx(-1.0002, abs=1e-3)
    assert stiffness_ratio(tuple(got)) > 9000.0


def test_eigenvalues_double_root_boundary():
    a = 2.0
    b = (1.0 + a) ** 2  # discriminant vanishes
    p = BrusselatorParams(a, b, np.array([1.0, 1.0]))
    lam1, lam2 = brusselator_eigenvalues(p)
    assert lam1 == pytest.approx(lam2, rel=1e-12)


@given(params_st)
def test_eigenvalue_symmetric_functions(ab):
    a, b = ab
    p = BrusselatorParams(a, b, np.array([1.0, 1.0]))
    lam1, lam2 = brusselator_eigenvalues(p)
    scale = 1.0 + abs(b - 1 - a * a) + a * a
    assert abs((lam1 + lam2) - (b - 1 - a * a)) <= 1e-10 * scale
    assert abs(lam1 * lam2 - a * a) <= 1e-10 * scale


def test_stiffness_ratio_rejects_zero():
    with pytest.raises(ValueError):
        stiffness_ratio((0.0 + 0j, 1.0 + 0j))


def test_brusselator_problem_wires_callbacks():
    p = BrusselatorParams(1.0, 3.0, np.array([1.5, 3.0]))
    prob = brusselator_problem(p, 20.0, 200)
    assert prob.n_global == 200
    assert np.array_equal(
        prob.velocity_fn(0.0, p.y0), brusselator_rhs(p, 0.0, p.y0)
    )


# --- vehicle model ----------------------------------------------------------------

def test_matrices_frozen_entries():
    m, c, k = vehicle_matrices(fsae_vitals())
    assert np.array_equal(np.diag(m), [14.0, 45.0, 20.0])
    assert k[0, 0] == pytest.approx(10800.0, rel=1e-12)
    assert k[0, 1] == pytest.approx(1440.0, rel=1e-12)
    assert k[1, 1] == pytest.approx(60192.0, rel=1e-12)
    # equal side-to-side rates decouple roll
    assert k[0, 2] == 0.0 and k[1, 2] == 0.0


def test_zero_dampers_give_zero_damping_matrix():
    vitals = fsae_vitals()
    p = VehicleParams(
        mass=vitals.mass,
        pitch_inertia=vitals.pitch_inertia,
        roll_inertia=vitals.roll_inertia,
        dampers=(0.0, 0.0, 0.0, 0.0),
        springs=vitals.springs,
        l_front=vitals.l_front,
        l_rear=vitals.l_rear,
        rho_front=vitals.rho_front,
        rho_rear=vitals.rho_rear,
        roadway=vitals.roadway,
    )
    _, c, _ = vehicle_matrices(p)
    assert np.array_equal(c, np.zeros((3, 3)))


@given(
    st.tuples(*[st.floats(min_value=0.0, max_value=500.0) for _ in range(4)]),
    st.tuples(*[st.floats(min_value=1.0, max_value=5000.0) for _ in range(4)]),
)
@settings(max_examples=30)
def test_matrices_symmetric(dampers, springs):
    vitals = fsae_vitals()
    p = VehicleParams(
        mass=vitals.mass,
        pitch_inertia=vitals.pitch_inertia,
        roll_inertia=vitals.roll_inertia,
        dampers=dampers,
        springs=springs,
        l_front=vitals.l_front,
        l_rear=vitals.l_rear,
        rho_front=vitals.rho_front,
        rho_rear=vitals.rho_rear,
        roadway=vitals.roadway,
    )
    m, c, k = vehicle_matrices(p)
    assert np.array_equal(c, c.T)
    assert np.array_equal(k, k.T)
    assert np.array_equal(m, m.T)


def test_shop_unit_conversion():
    p = fsae_vitals()
    assert p.dampers == (120.0, 120.0, 180.0, 180.0)   # lbs/(ft/s)
    assert p.springs == (1800.0, 1800.0, 3600.0, 3600.0)  # lbs/ft
    assert p.wheelbase == pytest.approx(5.0)
    assert p.weight == pytest.approx(14.0 * 32.174, rel=1e-15)
    assert p.weight == pytest.approx(450.0, abs=0.5)
    assert p.roadway.speed == pytest.approx(10.0 * 5280.0 / 3600.0, rel=1e-15)


def test_static_ic_against_independent_solve():
    p = fsae_vitals()
    x0, v0 = vehicle_static_ic(p)
    # independent assembly straight from the printed symmetric pattern
    k1 = k2 = 1800.0
    k3 = k4 = 3600.0
    lf, lr, rf, rr = 3.2, 1.8, 2.1, 2.0
    k = np.array([
        [k1 + k2 + k3 + k4,
         -(k1 + k2) * lf + (k3 + k4) * lr,
         -(k1 - k2) * rf + (k3 - k4) * rr],
        [-(k1 + k2) * lf + (k3 + k4) * lr,
         (k1 + k2) * lf**2 + (k3 + k4) * lr**2,
         (k1 - k2) * lf * rf + (k3 - k4) * lr * rr],
        [-(k1 - k2) * rf + (k3 - k4) * rr,
         (k1 - k2) * lf * rf + (k3 - k4) * lr * rr,
         (k1 + k2) * rf**2 + (k3 + k4) * rr**2],
    ])
    oracle = np.linalg.solve(k, np.array([p.weight, 0.0, 0.0]))
    assert x0 == pytest.approx(oracle, rel=1e-12)
    assert np.array_equal(v0, np.zeros(3))
    # heave about half an inch down, one milliradian of pitch, no roll
    assert x0[0] == pytest.approx(0.041840, abs=1e-6)
    assert x0[1] == pytest.approx(-1.0010e-3, abs=1e-6)
    assert x0[2] == 0.0


def test_static_ic_symmetric_rates():
    vitals = fsae_vitals()
    k = 1800.0
    p = VehicleParams(
        mass=vitals.mass,
        pitch_inertia=vitals.pitch_inertia,
        roll_inertia=vitals.roll_inertia,
        dampers=vitals.dampers,
        springs=(k, k, k, k),
        l_front=2.5,
        l_rear=2.5,
        rho_front=vitals.rho_front,
        rho_rear=vitals.rho_rear,
        roadway=vitals.roadway,
    )
    x0, _ = vehicle_static_ic(p)
    assert x0 == pytest.approx([p.weight / (4 * k), 0.0, 0.0], abs=1e-15)


def test_roadway_profile_shape():
    p = fsae_vitals()
    road = p.roadway
    r, rdot = roadway_excitation(p, 0.0)
    assert np.array_equal(r, np.zeros(4))
    assert np.array_equal(rdot, np.zeros(4))
    # crest under wheel 1 when it has travelled half a wavelength
    t_crest = (road.wavelength / 2.0) / road.speed
    r, rdot = roadway_excitation(p, t_crest)
    assert r[0] == pytest.approx(road.amplitude, rel=1e-12)
    assert rdot[0] == pytest.approx(0.0, abs=1e-12)
    # everything smooth again after the full train clears the rear wheels
    t_clear = (road.wave_count * road.wavelength + 1.1 * p.wheelbase) / road.speed
    r, rdot = roadway_excitation(p, t_clear + 0.01)
    assert np.array_equal(r, np.zeros(4))
    assert np.array_equal(rdot, np.zeros(4))


def test_roadway_is_continuous_in_time():
    p = fsae_vitals()
    road = p.roadway
    ts = np.linspace(-0.1, 3.0, 4001)
    samples = np.array([roadway_excitation(p, t)[0] for t in ts])
    max_rate = math.pi * road.amplitude / road.wavelength * road.speed
    jumps = np.abs(np.diff(samples, axis=0)).max()
    assert jumps <= max_rate * (ts[1] - ts[0]) * 1.05


def test_forcing_smooth_road_and_symmetry():
    p = fsae_vitals()
    f = vehicle_forcing(p, -1.0)  # wheels before the bumps
    assert np.array_equal(f, [p.weight, 0.0, 0.0])
    # same bumps on both sides (no lag): roll forcing cancels exactly
    sym = VehicleParams(
        mass=p.mass,
        pitch_inertia=p.pitch_inertia,
        roll_inertia=p.roll_inertia,
        dampers=p.dampers,
        springs=p.springs,
        l_front=p.l_front,
        l_rear=p.l_rear,
        rho_front=p.rho_front,
        rho_rear=p.rho_rear,
        roadway=RoadwayProfile(
            amplitude=p.roadway.amplitude,
            wavelength=p.roadway.wavelength,
            speed=p.roadway.speed,
            side_lag_fraction=0.0,
        ),
    )
    for t in (0.05, 0.2, 0.4, 0.9):
        assert vehicle_forcing(sym, t)[2] == 0.0


def test_acceleration_at_equilibrium_and_free_body():
    p = fsae_vitals()
    x0, v0 = vehicle_static_ic(p)
    a = vehicle_acceleration(p, -1.0, x0, v0)
    assert np.all(np.abs(a) <= 1e-10 * max(1.0, p.weight))
    a = vehicle_acceleration(p, -1.0, np.zeros(3), np.zeros(3))
    assert a == pytest.approx([p.gravity, 0.0, 0.0], rel=1e-14)


def test_problem_closure_matches_free_function():
    p = fsae_vitals()
    prob = vehicle_problem(p, t_end=4.0, n_global=500)
    rng = np.random.default_rng(11)
    for _ in range(5):
        t = float(rng.uniform(0.0, 3.0))
        x = rng.standard_normal(3) * 0.05
        v = rng.standard_normal(3) * 0.5
        assert prob.acceleration_fn(t, x, v) == pytest.approx(
            vehicle_acceleration(p, t, x, v), rel=1e-13, abs=1e-13
        )


# --- analytic catalogue ---------------------------------------------------------

def _fourth_order_derivative(f, t, h=1e-3):
    return (8 * (f(t + h) - f(t - h)) - (f(t + 2 * h) - f(t - 2 * h))) / (12 * h)


@pytest.mark.parametrize(
    "analytic",
    [
        exp_decay("first-order"),
        exp_decay("second-order"),
        exp_decay("dynamic"),
        forced_linear("first-order"),
        forced_linear("second-order"),
        forced_linear("dynamic"),
        harmonic_oscillator(),
    ],
    ids=lambda a: f"{a.name}-{type(a.problem).__name__}",
)
def test_exact_solutions_satisfy_their_ode(analytic):
    prob = analytic.problem
    for t in (0.1, 0.37, 0.9):
        x = analytic.exact_x(t)
        v = analytic.exact_v(t)
        dx = _fourth_order_derivative(analytic.exact_x, t)
        assert np.abs(dx - v).max() < 1e-12
        if hasattr(prob, "velocity_fn"):
            assert prob.velocity_fn(t, x) == pytest.approx(v, rel=1e-13, abs=1e-13)
        if hasattr(prob, "acceleration_fn"):
            dv = _fourth_order_derivative(analytic.exact_v, t)
            assert np.abs(prob.acceleration_fn(t, x, v) - dv).max() < 1e-12


def test_exact_values_at_landmarks():
    assert exp_decay().exact_x(1.0)[0] == pytest.approx(math.exp(-1.0), rel=1e-15)
    ho = harmonic_oscillator()
    assert ho.exact_x(2 * math.pi)[0] == pytest.approx(1.0, rel=1e-12)
    assert ho.exact_v(2 * math.pi)[0] == pytest.approx(0.0, abs=1e-12)


# --- presets --------------------------------------------------------------------

def test_preset_defaults():
    prob = build_preset("brusselator-limit-cycle")
    assert prob.t_end == 20.0 and prob.n_global == 200
    prob = build_preset("brusselator-stiff", ic=BENCHMARK_ICS[0])
    assert prob.t_end == 0.1 and prob.n_global == 100
    assert np.array_equal(prob.x0, [0.1, 0.1])
    prob = build_preset("fsae-bumps")
    assert prob.n_global == 500
    with pytest.raises(KeyError):
        build_preset("nonexistent")
