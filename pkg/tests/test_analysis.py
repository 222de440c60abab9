import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from braitenberg3a import (
    GaussianProfile,
    IntegratorConfig,
    ParabolicStimulus,
    QuadraticProfile,
    Trajectory,
    VehicleConfig,
    integrate,
    state_derivative,
)
from braitenberg3a.analysis import (
    EquilibriumKind,
    IncomparableRuns,
    axis_solution,
    compare_runs,
    eigen_closed_form,
    eigen_compare,
    eigvals3,
    equilibria,
    jacobian_fd,
    sup_norm_gap,
    time_to_abs_x,
    trajectory_metrics,
)

SUFFICIENT_X = 1 / math.sqrt(2 * 0.05)  # s' + 2 sx x^2 s'' < 0 iff |x| < this, Gaussian profile


def test_equilibria_circular():
    f = ParabolicStimulus(GaussianProfile(1.0), 0.05, 0.05)
    eq = equilibria(f, VehicleConfig())
    assert eq.kind is EquilibriumKind.CIRCULAR_CONTINUUM
    assert len(eq.poses) == 64
    assert all(p[:2] == (0.0, 0.0) for p in eq.poses)


def test_equilibria_four_isolated(field, cfg):
    eq = equilibria(field, cfg)
    assert eq.kind is EquilibriumKind.FOUR_ISOLATED
    assert sorted(p[2] for p in eq.poses) == sorted([0.0, math.pi, math.pi / 2, -math.pi / 2])


@pytest.mark.parametrize("sy", [0.05, 0.1])
@pytest.mark.parametrize("kind", ["ode", "dae"])
def test_equilibria_are_fixed_points(sy, kind):
    f = ParabolicStimulus(GaussianProfile(1.0), 0.05, sy)
    cfg = VehicleConfig()
    for pose in equilibria(f, cfg).poses:
        assert np.linalg.norm(state_derivative(pose, kind, f, cfg)) < 1e-12


def test_exact_wheel_law_turning_vanishes_on_axis_headings(field, cfg):
    # e_p^T D e = 0 is where the off-maximum sensors see matching rates
    for pose in equilibria(field, cfg).poses:
        assert abs(state_derivative(pose, "wheel_exact", field, cfg)[2]) < 1e-15
    assert abs(state_derivative((0.0, 0.0, 0.3), "wheel_exact", field, cfg)[2]) > 1e-6


def test_axis_solution_alpha_zero_is_classical(field):
    cfg = VehicleConfig(alpha=0.0)
    sol = axis_solution(-6.0, field, cfg, IntegratorConfig(t_max=50.0))
    # classical axis law xdot = F(s(sx x^2)) checked pointwise through the finite differences
    xd = np.gradient(sol.x, sol.t)
    classical = cfg.F(np.exp(-field.sigma_x * sol.x**2))
    np.testing.assert_allclose(xd[5:-5], classical[5:-5], rtol=2e-3)


def test_axis_solution_faster_with_rate_term(field, long_run):
    ts = {}
    for a in (0.0, 3.0):
        sol = axis_solution(-6.0, field, VehicleConfig(alpha=a), long_run)
        assert np.all(np.diff(sol.x) > 0)
        ts[a] = sol.t[np.argmax(np.abs(sol.x) < 0.1)]
    assert ts[3.0] < ts[0.0]


def test_axis_solution_matches_full_model(field, cfg, long_run):
    sol = axis_solution(-6.0, field, cfg, long_run)
    tr = integrate((-6.0, 0.0, 0.0), "ode", field, cfg, long_run)
    assert len(sol.t) == len(tr)
    np.testing.assert_allclose(sol.t, tr.t, atol=1e-9)
    assert np.max(np.abs(sol.x - tr.x)) < 1e-8


def test_axis_solution_needs_negative_start(field, cfg):
    with pytest.raises(ValueError):
        axis_solution(1.0, field, cfg)


def _hand_jacobian(state, f, cfg):
    # alpha = 0, s(q) = A - q, F = k q:
    # xdot = k q cos, ydot = k q sin, thetadot = -(2 k delta/d)(-sx x sin + sy y cos)
    x, y, th = state
    k, r = cfg.gain_k, cfg.delta / cfg.wheelbase
    sx, sy = f.sigma_x, f.sigma_y
    c, s = math.cos(th), math.sin(th)
    q = sx * x * x + sy * y * y
    return np.array(
        [
            [2 * k * sx * x * c, 2 * k * sy * y * c, -k * q * s],
            [2 * k * sx * x * s, 2 * k * sy * y * s, k * q * c],
            [2 * k * r * sx * s, -2 * k * r * sy * c, 2 * k * r * (sx * x * c + sy * y * s)],
        ]
    )


@pytest.mark.parametrize("state", [(-1.0, 0.5, 0.3), (0.7, -0.4, 2.0), (0.2, 1.1, -1.3)])
def test_jacobian_on_quadratic_patch(state):
    f = ParabolicStimulus(QuadraticProfile(5.0), 0.3, 0.7)
    cfg = VehicleConfig(alpha=0.0, s_top=5.0, delta=0.2, wheelbase=0.3, gain_k=1.5)
    np.testing.assert_allclose(jacobian_fd(state, "ode", f, cfg), _hand_jacobian(state, f, cfg), atol=1e-5)


def test_jacobian_second_order_in_step(field, cfg):
    state = (-4.0, 1.0, 0.3)
    exact = jacobian_fd(state, "ode", field, cfg, 1e-4)
    e1 = np.max(np.abs(jacobian_fd(state, "ode", field, cfg, 0.08) - exact))
    e2 = np.max(np.abs(jacobian_fd(state, "ode", field, cfg, 0.04) - exact))
    assert e1 / e2 == pytest.approx(4.0, rel=0.05)


def test_jacobian_at_circular_equilibrium():
    f = ParabolicStimulus(GaussianProfile(1.0), 0.05, 0.05)
    cfg = VehicleConfig()
    for th in (0.0, 1.0, -2.5):
        eig = eigvals3(jacobian_fd((0.0, 0.0, th), "ode", f, cfg))
        assert np.all(eig.real <= 1e-9)


@given(st.lists(st.floats(-5, 5), min_size=9, max_size=9))
def test_eigvals3_matches_numpy(entries):
    J = np.array(entries).reshape(3, 3)
    ref = np.linalg.eigvals(J)
    gaps = [abs(ref[i] - ref[j]) for i in range(3) for j in range(i + 1, 3)]
    assume(min(gaps) > 1e-2)
    ours = eigvals3(J)
    for z in ref:
        assert np.min(np.abs(ours - z)) < 1e-6 * (1 + np.abs(J).max())


def test_eigvals3_structured_cases():
    np.testing.assert_allclose(eigvals3(np.diag([3.0, -1.0, 2.0])).real, [-1.0, 2.0, 3.0], atol=1e-12)
    rot = np.array([[-0.5, 2.0, 0.0], [-2.0, -0.5, 0.0], [0.0, 0.0, -1.0]])
    ev = eigvals3(rot)
    assert ev[0] == pytest.approx(-1.0)
    assert ev[1] == pytest.approx(complex(-0.5, 2.0))
    assert ev[2] == pytest.approx(complex(-0.5, -2.0))
    np.testing.assert_allclose(eigvals3(np.zeros((3, 3))), 0.0)


@pytest.mark.parametrize("x", [-6.0, -3.0, -1.0, -0.2])
@pytest.mark.parametrize("alpha", [0.0, 1.5, 3.0])
def test_closed_form_lambda1_matches_numeric(field, x, alpha):
    rep = eigen_compare(x, field, VehicleConfig(alpha=alpha))
    assert rep.lambda1_rel_err < 1e-4
    assert "consistent" in rep.matching_variants(1e-3)


def test_alpha_zero_variants_coincide(field):
    cf = eigen_closed_form(-4.0, field, VehicleConfig(alpha=0.0))
    assert cf.delta1 == 1.0
    assert len(set(cf.variants.values())) == 1
    # classical value 2 sx x F' s'
    assert cf.lambda1 == pytest.approx(2 * 0.05 * -4.0 * -1.0 * -math.exp(-0.8), rel=1e-14)


def test_other_sign_conventions_do_not_match(field, cfg):
    rep = eigen_compare(-3.0, field, cfg)
    assert rep.matching_variants(1e-3) == ["consistent"]


@pytest.mark.parametrize("x", [-3.0, -2.0, -1.0, -0.3])
def test_sufficient_condition_gives_negative_lambda1(field, cfg, x):
    q = 0.05 * x * x
    assert -math.exp(-q) + 2 * 0.05 * x * x * math.exp(-q) < 0
    assert eigen_closed_form(x, field, cfg).lambda1 < 0


@pytest.mark.parametrize("x", [-3.0, -2.0, -1.0, -0.3])
def test_rate_term_speeds_convergence_inside_sufficient_region(field, x):
    lam = [eigen_closed_form(x, field, VehicleConfig(alpha=a)).lambda1 for a in np.linspace(0, 3.6, 37)]
    assert np.all(np.diff(lam) <= 0)


def test_rate_term_slows_convergence_far_out(field):
    # beyond |x| = 1/sqrt(2 sx) the shape term is positive and wins at alpha = 3
    assert 6.0 > SUFFICIENT_X
    assert eigen_closed_form(-6.0, field, VehicleConfig(alpha=3.0)).lambda1 > eigen_closed_form(
        -6.0, field, VehicleConfig(alpha=0.0)
    ).lambda1


@given(st.floats(-20, -1e-3), st.floats(0.0, 3.68))
def test_delta1_in_unit_interval(x, alpha):
    cf = eigen_closed_form(x, ParabolicStimulus(), VehicleConfig(alpha=alpha))
    assert 0 < cf.delta1 <= 1


def test_circular_field_drops_shape_difference():
    f = ParabolicStimulus(GaussianProfile(1.0), 0.05, 0.05)
    cfg = VehicleConfig()
    x = -2.0
    cf = eigen_closed_form(x, f, cfg)
    q = 0.05 * x * x
    s1, s2, F = -math.exp(-q), math.exp(-q), 1 - math.exp(-q)
    expected = cfg.delta * 0.05 * x * -1.0 * s1 / cf.delta2 - 3.0 * cfg.delta * F * (2 * s2 * 0.05**2 * x * x) / (
        cf.delta1 * cf.delta2
    )
    assert cf.re_lambda23 == pytest.approx(expected, rel=1e-13)
    assert eigen_compare(x, f, cfg).variant_rel_err["consistent"] < 1e-6


def _oscillating(t_end=30.0, dt=0.01):
    t = np.arange(0.0, t_end + dt / 2, dt)
    states = np.column_stack([-6 + 0.1 * t, np.exp(-0.1 * t) * np.cos(t), np.zeros_like(t)])
    z = np.zeros_like(t)
    return Trajectory(t, states, z, z, z, z, z + 1)


def test_oscillation_amplitudes_synthetic():
    m = trajectory_metrics(_oscillating(), ball=0.05, dt=0.01)
    # |y| peaks after the first crossing at t = k pi - atan(0.1)
    peaks = [math.exp(-0.1 * (k * math.pi - math.atan(0.1))) * abs(math.cos(k * math.pi - math.atan(0.1))) for k in (1, 2, 3)]
    np.testing.assert_allclose(m.oscillation_amplitudes[:3], peaks, rtol=1e-4)
    assert m.max_lateral_overshoot == pytest.approx(peaks[0], rel=1e-4)
    assert m.time_to_ball == math.inf


def test_straight_line_metrics(field, cfg, long_run):
    tr = integrate((-6.0, 0.0, 0.0), "ode", field, cfg, long_run)
    m = trajectory_metrics(tr, 0.05)
    assert m.max_lateral_overshoot == 0.0
    assert m.oscillation_amplitudes == []
    assert m.path_length == pytest.approx(6.0 - 0.05, abs=1e-9)
    assert m.time_to_ball == pytest.approx(tr.t[-1], abs=1e-9)


def test_metrics_ball_larger_than_arrival_radius(field, cfg, long_run):
    tr = integrate((-6.0, 0.0, 0.0), "ode", field, cfg, long_run)
    m = trajectory_metrics(tr, 1.0)
    assert m.path_length == pytest.approx(5.0, abs=1e-9)
    assert m.time_to_ball == pytest.approx(time_to_abs_x(tr, 1.0), abs=1e-2)


def test_compare_identical_runs(field, cfg, long_run):
    tr = integrate((-6.0, 1.0, 0.0), "ode", field, cfg, long_run)
    a, b = compare_runs(tr, tr, 0.05)
    assert a == b
    assert a.path_length >= math.hypot(-6.0, 1.0) - 0.05


def test_compare_rejects_different_starts(field, cfg):
    icfg = IntegratorConfig(t_max=5.0)
    a = integrate((-6.0, 1.0, 0.0), "ode", field, cfg, icfg)
    b = integrate((-6.0, 0.5, 0.0), "ode", field, cfg, icfg)
    with pytest.raises(IncomparableRuns):
        compare_runs(a, b, 0.05)


def test_metrics_stable_under_resampling(field, cfg, long_run):
    tr = integrate((-2.0, 1.0, math.atan(-0.5)), "ode", field, cfg, long_run)
    a = trajectory_metrics(tr, 0.05, dt=0.02)
    b = trajectory_metrics(tr, 0.05, dt=0.01)
    assert a.path_length == pytest.approx(b.path_length, abs=1e-6)
    assert a.time_to_ball == pytest.approx(b.time_to_ball, abs=1e-9)
    assert a.max_lateral_overshoot == pytest.approx(b.max_lateral_overshoot, abs=1e-5)


def test_sup_norm_gap(field, cfg):
    icfg = IntegratorConfig(t_max=10.0)
    a = integrate((-6.0, 1.0, 0.0), "ode", field, cfg, icfg)
    assert sup_norm_gap(a, a) == 0.0
    b = integrate((-6.0, 1.0, 0.0), "ode", field, VehicleConfig(alpha=0.0), icfg)
    assert sup_norm_gap(a, b) > 0.1
