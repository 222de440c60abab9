"""Vehicle geometry, sensor placement and the wheel-speed law.

Each wheel is driven by the stimulus on its own side plus, contralaterally,
the rate of change of the stimulus on the opposite sensor::

    v_r = F(S(x_r)) + G(dS(x_l)/dt)
    v_l = F(S(x_l)) + G(dS(x_r)/dt)

with ``F(s) = k (s_top - s)`` and ``G(sdot) = alpha * sdot``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .field import ParabolicStimulus

__all__ = [
    "VehicleConfig",
    "BodyFrame",
    "WheelSpeeds",
    "Twist",
    "SingularState",
    "SingularCoupling",
    "wrap_angle",
    "body_frame",
    "sensor_positions",
    "wheel_law",
    "wheel_speeds_given_twist",
    "solve_wheel_speeds",
    "twist_from_wheels",
    "twist_from_state_derivative",
]

#: determinant magnitude below which the wheel-level closure is treated as singular
COUPLING_TOL = 1e-12


class SingularState(ArithmeticError):
    """The closed loop has no bounded velocity at this state."""


class SingularCoupling(SingularState):
    """The 2x2 wheel-speed closure is (numerically) singular."""


@dataclass(frozen=True)
class VehicleConfig:
    delta: float = 0.25
    wheelbase: float = 0.25
    gain_k: float = 1.0
    alpha: float = 3.0
    s_top: float = 1.0

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"sensor separation delta must be positive, got {self.delta}")
        if not self.wheelbase > 0:
            raise ValueError(f"wheelbase must be positive, got {self.wheelbase}")
        if not self.gain_k > 0:
            raise ValueError(f"gain_k must be positive, got {self.gain_k}")
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be nonnegative, got {self.alpha}")
        if not self.s_top > 0:
            raise ValueError(f"s_top must be positive, got {self.s_top}")

    def F(self, s: float) -> float:
        return self.gain_k * (self.s_top - s)

    def dF(self, s: float) -> float:
        return -self.gain_k

    def G(self, sdot: float) -> float:
        return self.alpha * sdot

    def dG(self, sdot: float) -> float:
        return self.alpha


class BodyFrame(NamedTuple):
    e: np.ndarray
    e_p: np.ndarray


class WheelSpeeds(NamedTuple):
    v_r: float
    v_l: float


class Twist(NamedTuple):
    v: float
    omega: float


def wrap_angle(theta: float) -> float:
    """Map an angle to (-pi, pi]."""
    w = math.remainder(theta, 2 * math.pi)
    return math.pi if w == -math.pi else w


def body_frame(theta: float) -> BodyFrame:
    c, s = math.cos(theta), math.sin(theta)
    return BodyFrame(np.array([c, s]), np.array([-s, c]))


def sensor_positions(state, cfg: VehicleConfig):
    """Return ``(right, left)`` sensor positions for pose ``state = (x, y, theta)``."""
    x, y, theta = state
    _, e_p = body_frame(theta)
    p = np.array([x, y], dtype=float)
    half = 0.5 * cfg.delta * e_p
    return p - half, p + half


def wheel_law(F_r, F_l, sdot_r, sdot_l, cfg: VehicleConfig) -> WheelSpeeds:
    """Wheel speeds from sensed stimulus drives and sensed stimulus rates."""
    return WheelSpeeds(F_r + cfg.G(sdot_l), F_l + cfg.G(sdot_r))


def _sensor_terms(state, field: ParabolicStimulus, cfg: VehicleConfig):
    e, _ = body_frame(state[2])
    x_r, x_l = sensor_positions(state, cfg)
    F_r = cfg.F(field.value(x_r))
    F_l = cfg.F(field.value(x_l))
    g_r = float(field.gradient(x_r) @ e)
    g_l = float(field.gradient(x_l) @ e)
    return F_r, F_l, g_r, g_l


def wheel_speeds_given_twist(state, twist: Twist, field: ParabolicStimulus, cfg: VehicleConfig) -> WheelSpeeds:
    """Evaluate the wheel law for a given body twist.

    Sensor points of a rigid unicycle move along the heading with speeds
    ``v + delta*omega/2`` (right) and ``v - delta*omega/2`` (left).
    """
    F_r, F_l, g_r, g_l = _sensor_terms(state, field, cfg)
    v, omega = twist
    sdot_r = g_r * (v + 0.5 * cfg.delta * omega)
    sdot_l = g_l * (v - 0.5 * cfg.delta * omega)
    return wheel_law(F_r, F_l, sdot_r, sdot_l, cfg)


def twist_from_wheels(w: WheelSpeeds, cfg: VehicleConfig) -> Twist:
    return Twist(0.5 * (w.v_r + w.v_l), (w.v_r - w.v_l) / cfg.wheelbase)


def solve_wheel_speeds(state, field: ParabolicStimulus, cfg: VehicleConfig) -> WheelSpeeds:
    """Self-consistent wheel speeds at ``state``.

    The sensed rates depend on the wheel speeds themselves. With linear ``G``
    the closure is the 2x2 linear system

        [1 - a g_l b,  -a g_l c] [v_r]   [F_r]
        [-a g_r c,  1 - a g_r b] [v_l] = [F_l]

    where ``c = (1 + delta/d)/2`` and ``b = (1 - delta/d)/2``.
    """
    F_r, F_l, g_r, g_l = _sensor_terms(state, field, cfg)
    a = cfg.alpha
    r = cfg.delta / cfg.wheelbase
    c = 0.5 * (1.0 + r)
    b = 0.5 * (1.0 - r)
    m11 = 1.0 - a * g_l * b
    m12 = -a * g_l * c
    m21 = -a * g_r * c
    m22 = 1.0 - a * g_r * b
    det = m11 * m22 - m12 * m21
    if abs(det) < COUPLING_TOL:
        raise SingularCoupling(f"wheel closure determinant {det:.3e} at state {tuple(state)}")
    v_r = (m22 * F_r - m12 * F_l) / det
    v_l = (m11 * F_l - m21 * F_r) / det
    return WheelSpeeds(v_r, v_l)


def twist_from_state_derivative(state, x_dot, theta_dot: float, field: ParabolicStimulus, cfg: VehicleConfig) -> Twist:
    """First-order (midpoint) reduction of the wheel law to a body twist.

    Expands the sensor terms to first order in ``delta`` about the midpoint::

        v     = F(S) + G(grad S . xdot)
        omega = -(delta/d) F'(S) grad S . e_p
                - (delta/d) G'(grad S . xdot) [thetadot grad S . e - e_p^T H xdot]
    """
    x, y, theta = state
    p = np.array([x, y], dtype=float)
    x_dot = np.asarray(x_dot, dtype=float)
    e, e_p = body_frame(theta)
    S = field.value(p)
    gS = field.gradient(p)
    H = field.hessian(p)
    sdot = float(gS @ x_dot)
    r = cfg.delta / cfg.wheelbase
    v = cfg.F(S) + cfg.G(sdot)
    omega = -r * cfg.dF(S) * float(gS @ e_p) - r * cfg.dG(sdot) * (theta_dot * float(gS @ e) - float(e_p @ H @ x_dot))
    return Twist(v, omega)
