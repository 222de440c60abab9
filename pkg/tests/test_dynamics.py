import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from braitenberg3a import GaussianProfile, ParabolicStimulus, SingularState, VehicleConfig
from braitenberg3a.controller import body_frame
from braitenberg3a.dynamics import (
    ModelKind,
    alpha_admissible,
    coupling_matrix,
    dae_residual,
    det_direct,
    det_guard,
    drift_flow,
    forward_speed_factor,
    state_derivative,
)

coord = st.floats(-12, 12, allow_nan=False)
angle = st.floats(-math.pi, math.pi)

# on the default field at (-6, 0): grad S . e = 0.6 e^{-1.8}, F = 1 - e^{-1.8}
G_AXIS = 0.6 * math.exp(-1.8)
F_AXIS = 1 - math.exp(-1.8)


@pytest.mark.parametrize("theta", [0.0, 0.4, math.pi / 2, -2.0])
def test_coupling_matrix_at_source(field, cfg, theta):
    A = coupling_matrix((0.0, 0.0, theta), field, cfg)
    # only the Hessian row survives: (delta/d) e_p^T diag(-0.1, -0.2)
    expected = np.zeros((3, 3))
    expected[2, :2] = [0.1 * math.sin(theta), -0.2 * math.cos(theta)]
    np.testing.assert_allclose(A, expected, atol=1e-16)


@given(coord, coord, angle, st.floats(0, 5))
def test_coupling_matrix_structure(x, y, theta, alpha):
    f = ParabolicStimulus()
    A = coupling_matrix((x, y, theta), f, VehicleConfig(alpha=alpha))
    assert A[0, 2] == 0.0 and A[1, 2] == 0.0
    np.testing.assert_array_equal(A, coupling_matrix((x, y, theta), f, VehicleConfig(alpha=0.0)))
    e, _ = body_frame(theta)
    assert A[2, 2] == pytest.approx(-(f.gradient((x, y)) @ e), rel=1e-15, abs=1e-300)


def test_det_guard_examples(field, cfg):
    assert det_guard((0.0, 0.0, 1.2), field, cfg) == 1.0
    assert det_guard((-4.0, 3.0, 0.5), field, VehicleConfig(alpha=0.0)) == 1.0


@given(coord, coord, angle, st.floats(0, 4), st.floats(0.05, 1.0), st.floats(0.05, 1.0))
def test_det_guard_matches_direct_determinant(x, y, theta, alpha, delta, d):
    f = ParabolicStimulus()
    cfg = VehicleConfig(delta=delta, wheelbase=d, alpha=alpha)
    closed = det_guard((x, y, theta), f, cfg)
    direct = det_direct((x, y, theta), f, cfg)
    assert closed == pytest.approx(direct, rel=1e-12)


def test_alpha_admissible():
    circ = ParabolicStimulus(GaussianProfile(1.0), 0.05, 0.05)
    assert not alpha_admissible(circ, VehicleConfig(alpha=0.0)).ok
    adm = alpha_admissible(circ, VehicleConfig(alpha=3.0))
    assert adm.ok
    assert adm.margin + 3.0 == pytest.approx(5.214, abs=5e-4)
    assert not alpha_admissible(circ, VehicleConfig(alpha=6.0)).ok
    assert alpha_admissible(ParabolicStimulus(), VehicleConfig(alpha=3.0)).ok


@pytest.mark.parametrize("kind", [ModelKind.ODE, ModelKind.DAE])
@pytest.mark.parametrize("sy", [0.05, 0.1])
def test_source_is_stationary_for_midpoint_models(kind, sy):
    # F and grad S both vanish at the source, so every heading is stationary
    f = ParabolicStimulus(GaussianProfile(1.0), 0.05, sy)
    for theta in np.linspace(-3, 3, 13):
        np.testing.assert_array_equal(np.abs(state_derivative((0.0, 0.0, theta), kind, f, VehicleConfig())), 0.0)


def test_axis_derivative_hand_value(field, cfg):
    xd = state_derivative((-6.0, 0.0, 0.0), ModelKind.ODE, field, cfg)
    assert xd[0] == pytest.approx(F_AXIS / (1 - 3 * G_AXIS), rel=1e-14)
    assert xd[0] == pytest.approx(1.1883, abs=5e-5)
    assert xd[1] == 0.0 and xd[2] == 0.0
    np.testing.assert_allclose(state_derivative((-6.0, 0.0, 0.0), ModelKind.DAE, field, cfg), xd, atol=1e-14)


@given(coord, coord, angle)
def test_alpha_zero_is_classical_vehicle(x, y, theta):
    f = ParabolicStimulus()
    cfg = VehicleConfig(alpha=0.0)
    e, ep = body_frame(theta)
    F = cfg.F(f.value((x, y)))
    gradF = -cfg.gain_k * f.gradient((x, y))
    classical = np.array([F * e[0], F * e[1], -(cfg.delta / cfg.wheelbase) * gradF @ ep])
    np.testing.assert_allclose(state_derivative((x, y, theta), "ode", f, cfg), classical, rtol=1e-13, atol=1e-15)


@given(coord, coord, angle, st.floats(0, 3.6))
def test_closed_form_solves_implicit_form(x, y, theta, alpha):
    f = ParabolicStimulus()
    cfg = VehicleConfig(alpha=alpha)
    xd = state_derivative((x, y, theta), ModelKind.ODE, f, cfg)
    M = np.eye(3) - alpha * coupling_matrix((x, y, theta), f, cfg)
    np.testing.assert_allclose(M @ xd, drift_flow((x, y, theta), f, cfg), atol=1e-10)
    assert np.max(np.abs(dae_residual((x, y, theta), xd, f, cfg))) < 1e-10
    np.testing.assert_allclose(state_derivative((x, y, theta), ModelKind.DAE, f, cfg), xd, atol=1e-10)


def test_forward_speed_factor(field, cfg):
    assert forward_speed_factor((-6.0, 0.0, 0.0), field, cfg) == pytest.approx(1 / (1 - 3 * G_AXIS), rel=1e-14)
    assert forward_speed_factor((-6.0, 0.0, 0.0), field, cfg) == pytest.approx(1.4235, abs=1e-4)  # quoted truncated
    assert forward_speed_factor((-6.0, 0.0, math.pi), field, cfg) == pytest.approx(0.7707, abs=5e-5)
    assert forward_speed_factor((-6.0, 0.0, math.pi / 2), field, cfg) == pytest.approx(1.0, abs=1e-15)
    assert forward_speed_factor((0.0, 0.0, 0.3), field, cfg) == 1.0


@given(st.floats(-12, 12).filter(lambda v: abs(v) > 1e-3), coord, st.floats(0.1, 3.6))
def test_speed_up_facing_source_slow_down_facing_away(x, y, alpha):
    f = ParabolicStimulus()
    g = f.gradient((x, y))
    theta = math.atan2(g[1], g[0])
    for th, cmp in ((theta, np.greater), (theta + math.pi, np.less)):
        fast = np.hypot(*state_derivative((x, y, th), "ode", f, VehicleConfig(alpha=alpha))[:2])
        slow = np.hypot(*state_derivative((x, y, th), "ode", f, VehicleConfig(alpha=0.0))[:2])
        if np.linalg.norm(g) > 1e-12:
            assert cmp(fast, slow)


def test_singular_state(field):
    cfg = VehicleConfig(alpha=1 / G_AXIS)
    for kind in (ModelKind.ODE, ModelKind.DAE):
        with pytest.raises(SingularState):
            state_derivative((-6.0, 0.0, 0.0), kind, field, cfg)
    with pytest.raises(SingularState):
        forward_speed_factor((-6.0, 0.0, 0.0), field, cfg)
    # the turning denominator d + alpha delta g vanishes facing away when delta = d
    with pytest.raises(SingularState):
        state_derivative((-6.0, 0.0, math.pi), "ode", field, cfg)


@pytest.mark.parametrize("state", [(-6.0, 1.0, 0.0), (-2.0, 1.0, math.atan(-0.5)), (4.0, -3.0, 2.5)])
def test_wheel_exact_differs_at_second_order(field, state):
    gaps = []
    for delta in (0.2, 0.1, 0.05):
        cfg = VehicleConfig(delta=delta, wheelbase=delta)
        gaps.append(
            np.max(np.abs(state_derivative(state, "wheel_exact", field, cfg) - state_derivative(state, "ode", field, cfg)))
        )
    assert gaps[0] / gaps[1] == pytest.approx(4.0, rel=0.05)
    assert gaps[1] / gaps[2] == pytest.approx(4.0, rel=0.05)


def test_model_kind_parse():
    assert ModelKind.parse("OdeClosedForm") is ModelKind.ODE
    assert ModelKind.parse("DaeLinearSolve") is ModelKind.DAE
    assert ModelKind.parse("WheelExact") is ModelKind.WHEEL_EXACT
    assert ModelKind.parse("wheel_exact") is ModelKind.WHEEL_EXACT
    with pytest.raises(ValueError):
        ModelKind.parse("euler")
