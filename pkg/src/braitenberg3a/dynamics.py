"""Closed-loop vehicle dynamics in three formulations.

``WHEEL_EXACT``
    Self-consistent wheel law at the two sensor points, then unicycle kinematics.
``DAE``
    Midpoint (first-order) model written as ``Xdot = f(X) + alpha A(X) Xdot``
    and resolved per evaluation by the linear solve ``(I - alpha A) Xdot = f``.
``ODE``
    The same model with the linear solve carried out symbolically.

``DAE`` and ``ODE`` are algebraically identical; ``WHEEL_EXACT`` differs from
them at second order in the sensor separation.
"""

from __future__ import annotations

import enum
import math
from typing import NamedTuple

import numpy as np

from .controller import (
    SingularState,
    VehicleConfig,
    body_frame,
    solve_wheel_speeds,
    twist_from_wheels,
)
from .field import ParabolicStimulus

__all__ = [
    "ModelKind",
    "Admissibility",
    "DENOM_TOL",
    "coupling_matrix",
    "drift_flow",
    "det_guard",
    "det_direct",
    "dae_residual",
    "alpha_admissible",
    "state_derivative",
    "forward_speed_factor",
]

#: magnitude below which a closed-loop denominator is treated as zero
DENOM_TOL = 1e-8


class ModelKind(enum.Enum):
    WHEEL_EXACT = "wheel_exact"
    DAE = "dae"
    ODE = "ode"

    @classmethod
    def parse(cls, name) -> "ModelKind":
        if isinstance(name, cls):
            return name
        aliases = {
            "wheelexact": cls.WHEEL_EXACT,
            "wheel": cls.WHEEL_EXACT,
            "daelinearsolve": cls.DAE,
            "odeclosedform": cls.ODE,
        }
        key = str(name).lower()
        try:
            return aliases.get(key.replace("_", ""), None) or cls(key)
        except ValueError:
            raise ValueError(f"unknown model kind {name!r}; expected one of {[k.value for k in cls]}") from None


class Admissibility(NamedTuple):
    ok: bool
    margin: float


def _local(state, field: ParabolicStimulus):
    x, y, theta = state
    p = np.array([x, y], dtype=float)
    e, e_p = body_frame(theta)
    return p, e, e_p, field.gradient(p)


def coupling_matrix(state, field: ParabolicStimulus, cfg: VehicleConfig) -> np.ndarray:
    """Matrix ``A(X)`` multiplying ``alpha * Xdot`` on the right-hand side."""
    p, e, e_p, gS = _local(state, field)
    r = cfg.delta / cfg.wheelbase
    hrow = r * (e_p @ field.hessian(p))
    return np.array(
        [
            [gS[0] * e[0], gS[1] * e[0], 0.0],
            [gS[0] * e[1], gS[1] * e[1], 0.0],
            [hrow[0], hrow[1], -r * float(gS @ e)],
        ]
    )


def drift_flow(state, field: ParabolicStimulus, cfg: VehicleConfig) -> np.ndarray:
    """The terms free of ``Xdot``: ``[F cos, F sin, -(delta/d) grad F . e_p]``."""
    p, e, e_p, gS = _local(state, field)
    S = field.value(p)
    Fv = cfg.F(S)
    gF = cfg.dF(S) * gS
    return np.array([Fv * e[0], Fv * e[1], -(cfg.delta / cfg.wheelbase) * float(gF @ e_p)])


def det_guard(state, field: ParabolicStimulus, cfg: VehicleConfig) -> float:
    """Closed-form ``det(I - alpha A) = -(1/d) (alpha g - 1)(alpha delta g + d)``, ``g = grad S . e``."""
    _, e, _, gS = _local(state, field)
    g = float(gS @ e)
    a, d = cfg.alpha, cfg.wheelbase
    return -(a * g - 1.0) * (a * cfg.delta * g + d) / d


def det_direct(state, field: ParabolicStimulus, cfg: VehicleConfig) -> float:
    return float(np.linalg.det(np.eye(3) - cfg.alpha * coupling_matrix(state, field, cfg)))


def dae_residual(state, xdot, field: ParabolicStimulus, cfg: VehicleConfig) -> np.ndarray:
    """Residual ``Xdot - f(X) - alpha A(X) Xdot`` of the implicit form."""
    xdot = np.asarray(xdot, dtype=float)
    A = coupling_matrix(state, field, cfg)
    return xdot - drift_flow(state, field, cfg) - cfg.alpha * (A @ xdot)


def alpha_admissible(field: ParabolicStimulus, cfg: VehicleConfig) -> Admissibility:
    """Whether ``0 < alpha < 1/max|grad S|``; ``margin`` is ``1/max|grad S| - alpha``."""
    bound = 1.0 / field.max_gradient_norm()
    return Admissibility(0.0 < cfg.alpha < bound, bound - cfg.alpha)


def _denominators(g: float, cfg: VehicleConfig):
    den_v = 1.0 - cfg.alpha * g
    den_w = cfg.wheelbase + cfg.alpha * cfg.delta * g
    if abs(den_v) < DENOM_TOL or abs(den_w) < DENOM_TOL:
        raise SingularState(f"closed-loop denominators ({den_v:.3e}, {den_w:.3e}) vanish")
    return den_v, den_w


def forward_speed_factor(state, field: ParabolicStimulus, cfg: VehicleConfig) -> float:
    """Speed gain ``1/(1 - alpha grad S . e)`` relative to the plain vehicle."""
    _, e, _, gS = _local(state, field)
    den_v, _ = _denominators(float(gS @ e), cfg)
    return 1.0 / den_v


def _ode(state, field, cfg):
    p, e, e_p, gS = _local(state, field)
    g = float(gS @ e)
    den_v, den_w = _denominators(g, cfg)
    S = field.value(p)
    Fv = cfg.F(S)
    gF_ep = cfg.dF(S) * float(gS @ e_p)
    eHe = float(e_p @ field.hessian(p) @ e)
    v = Fv / den_v
    theta_dot = -cfg.delta * gF_ep / den_w + cfg.alpha * cfg.delta * Fv * eHe / (den_v * den_w)
    return np.array([v * e[0], v * e[1], theta_dot])


def _dae(state, field, cfg):
    M = np.eye(3) - cfg.alpha * coupling_matrix(state, field, cfg)
    det = np.linalg.det(M)
    if abs(det) < DENOM_TOL:
        raise SingularState(f"det(I - alpha A) = {det:.3e}")
    return np.linalg.solve(M, drift_flow(state, field, cfg))


def _wheel(state, field, cfg):
    v, omega = twist_from_wheels(solve_wheel_speeds(state, field, cfg), cfg)
    theta = state[2]
    return np.array([v * math.cos(theta), v * math.sin(theta), omega])


_KINDS = {ModelKind.ODE: _ode, ModelKind.DAE: _dae, ModelKind.WHEEL_EXACT: _wheel}


def state_derivative(state, kind: ModelKind, field: ParabolicStimulus, cfg: VehicleConfig) -> np.ndarray:
    """``Xdot`` for pose ``state = (x, y, theta)`` under the chosen formulation.

    Raises
    ------
    SingularState
        If the closed loop is singular at ``state``.
    """
    return _KINDS[ModelKind.parse(kind)](state, field, cfg)
