"""Time integration of the closed loop.

Two explicit schemes are provided: classical fixed-step RK4 (kept mainly for
convergence checks) and the Dormand-Prince 5(4) embedded pair with standard
step-size control. Arrival at the source is located inside the accepted step
with a cubic Hermite interpolant.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field as dc_field, replace
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .controller import SingularState, VehicleConfig, wrap_angle
from .dynamics import ModelKind, det_guard, state_derivative
from .field import ParabolicStimulus

__all__ = [
    "Method",
    "Termination",
    "IntegratorConfig",
    "Trajectory",
    "consistent_initialization",
    "integrate",
    "resample",
    "MIN_STEP",
]

MIN_STEP = 1e-12


class Method(enum.Enum):
    RK4 = "rk4"
    RK45 = "rk45"


class Termination(enum.Enum):
    TIMEOUT = "timeout"
    SOURCE_REACHED = "source_reached"
    SINGULARITY_ABORT = "singularity_abort"
    STEP_FAILURE = "step_failure"


@dataclass(frozen=True)
class IntegratorConfig:
    method: Method = Method.RK45
    step: float = 0.01
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    t_max: float = 100.0
    source_radius: float = 0.05
    max_step: float = 0.25

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("integrator tolerances must be positive")
        if not self.t_max > 0:
            raise ValueError("t_max must be positive")
        if not 0 < self.step <= self.t_max:
            raise ValueError(f"step must lie in (0, t_max], got {self.step}")
        if not self.max_step > 0:
            raise ValueError("max_step must be positive")
        if not self.source_radius >= 0:
            raise ValueError("source_radius must be nonnegative")


@dataclass
class Trajectory:
    """Time-stamped closed-loop samples.

    ``states`` has shape ``(n, 3)`` with columns ``x, y, theta``; the scalar
    channels are per-sample arrays of length ``n``.
    """

    t: np.ndarray
    states: np.ndarray
    v: np.ndarray
    omega: np.ndarray
    v_r: np.ndarray
    v_l: np.ndarray
    det_guard: np.ndarray
    termination: Termination = Termination.TIMEOUT
    error_estimate: float = 0.0
    n_rejected: int = 0
    meta: dict = dc_field(default_factory=dict)

    def __len__(self):
        return len(self.t)

    @property
    def x(self):
        return self.states[:, 0]

    @property
    def y(self):
        return self.states[:, 1]

    @property
    def theta(self):
        return self.states[:, 2]

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def consistent_initialization(state0, kind, field: ParabolicStimulus, cfg: VehicleConfig) -> np.ndarray:
    """Initial ``Xdot`` satisfying the algebraic closure of ``kind`` at ``state0``."""
    return state_derivative(state0, kind, field, cfg)


# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = np.array(_A[6] + (0.0,))
_B4 = np.array((5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40))
_E = _B5 - _B4


def _dopri_step(f, y, k1, h):
    K = np.empty((7, y.size))
    K[0] = k1
    for i in range(1, 7):
        K[i] = f(y + h * (np.asarray(_A[i]) @ K[:i]))
    # stage 7 is evaluated at y_new (FSAL), so K[6] = f(y_new)
    y_new = y + h * (_B5[:6] @ K[:6])
    err = h * (_E @ K)
    return y_new, K[6], err


def _rk4_step(f, y, k1, h):
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    y_new = y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y_new, f(y_new)


def _hermite(y0, f0, y1, f1, h, s):
    u = s / h
    h00 = 2 * u**3 - 3 * u**2 + 1
    h10 = u**3 - 2 * u**2 + u
    h01 = -2 * u**3 + 3 * u**2
    h11 = u**3 - u**2
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1


def _solve(
    f: Callable[[np.ndarray], np.ndarray],
    y0,
    icfg: IntegratorConfig,
    arrived: Callable[[np.ndarray], float] | None = None,
    wrap: Callable[[np.ndarray], np.ndarray] | None = None,
):
    """Generic driver shared by the 3-D closed loop and the 1-D axis model.

    ``arrived(y)`` is a signed distance to the target set (negative inside).
    Returns ``(ts, ys, fs, termination, error_estimate, n_rejected)``; the
    initial derivative must be computable (``SingularState`` propagates).
    """
    y = np.array(y0, dtype=float)
    if wrap is not None:
        y = wrap(y)
    k1 = f(y)
    ts, ys, fs = [0.0], [y.copy()], [k1]
    if arrived is not None and arrived(y) < 0:
        return ts, ys, fs, Termination.SOURCE_REACHED, 0.0, 0

    t, t_max = 0.0, icfg.t_max
    adaptive = icfg.method is Method.RK45
    h = min(icfg.step, icfg.max_step) if adaptive else icfg.step
    err_sum = 0.0
    n_rej = 0
    n_steps = 0
    last_singular = False
    term = Termination.TIMEOUT

    while t < t_max * (1 - 1e-15):
        h_try = min(h, t_max - t)
        try:
            if adaptive:
                y_new, k_new, err = _dopri_step(f, y, k1, h_try)
                scale = icfg.abs_tol + icfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
                enorm = float(np.max(np.abs(err) / scale))
            else:
                y_new, k_new = _rk4_step(f, y, k1, h_try)
                enorm = 0.0
            if not (np.all(np.isfinite(y_new)) and np.all(np.isfinite(k_new))):
                raise FloatingPointError
            last_singular = False
        except SingularState:
            enorm = math.inf
            last_singular = True
        except FloatingPointError:
            enorm = math.inf

        if adaptive and enorm > 1.0:
            n_rej += 1
            factor = 0.25 if math.isinf(enorm) else max(0.2, 0.9 * enorm ** -0.2)
            h = h_try * factor
            if h < MIN_STEP:
                term = Termination.SINGULARITY_ABORT if last_singular else Termination.STEP_FAILURE
                break
            continue
        if not adaptive and math.isinf(enorm):
            term = Termination.SINGULARITY_ABORT if last_singular else Termination.STEP_FAILURE
            break

        if adaptive:
            err_sum += float(np.max(np.abs(err)))
        n_steps += 1
        t_new = t_max if h_try == t_max - t else (t + h_try if adaptive else n_steps * icfg.step)

        if arrived is not None and arrived(y_new) < 0:
            g = lambda s: arrived(_hermite(y, k1, y_new, k_new, h_try, s))
            s_hit = brentq(g, 0.0, h_try, xtol=1e-14, rtol=4 * np.finfo(float).eps)
            y_hit = _hermite(y, k1, y_new, k_new, h_try, s_hit)
            try:
                k_hit = f(y_hit)
            except SingularState:
                y_hit, k_hit, s_hit = y_new, k_new, h_try
            if wrap is not None:
                y_hit = wrap(y_hit)
            ts.append(t + s_hit)
            ys.append(y_hit)
            fs.append(k_hit)
            term = Termination.SOURCE_REACHED
            break

        y, k1, t = y_new, k_new, t_new
        if wrap is not None:
            y = wrap(y)
        ts.append(t)
        ys.append(y.copy())
        fs.append(k1)
        if adaptive:
            h = min(icfg.max_step, h_try * min(5.0, max(0.2, 0.9 * max(enorm, 1e-10) ** -0.2)))

    return ts, ys, fs, term, err_sum, n_rej


def _wrap_pose(y):
    y[2] = wrap_angle(y[2])
    return y


def integrate(state0, kind, field: ParabolicStimulus, cfg: VehicleConfig, icfg: IntegratorConfig | None = None) -> Trajectory:
    """Integrate the closed loop from pose ``state0``.

    Stops at ``icfg.t_max``, on entering the disc of radius
    ``icfg.source_radius`` around the source, or when the closed loop turns
    singular or the adaptive step underflows.

    Raises
    ------
    SingularState
        If ``state0`` itself is singular (no consistent initial derivative).
    """
    icfg = icfg or IntegratorConfig()
    kind = ModelKind.parse(kind)
    consistent_initialization(state0, kind, field, cfg)

    def f(y):
        return state_derivative(y, kind, field, cfg)

    radius = icfg.source_radius

    def arrived(y):
        return math.hypot(y[0], y[1]) - radius

    ts, ys, fs, term, err, n_rej = _solve(f, state0, icfg, arrived if radius > 0 else None, _wrap_pose)
    states = np.array(ys)
    derivs = np.array(fs)
    c, s = np.cos(states[:, 2]), np.sin(states[:, 2])
    v = derivs[:, 0] * c + derivs[:, 1] * s
    omega = derivs[:, 2]
    half = 0.5 * cfg.wheelbase * omega
    dg = np.array([det_guard(X, field, cfg) for X in states])
    return Trajectory(
        t=np.array(ts),
        states=states,
        v=v,
        omega=omega,
        v_r=v + half,
        v_l=v - half,
        det_guard=dg,
        termination=term,
        error_estimate=err,
        n_rejected=n_rej,
        meta={"kind": kind.value},
    )


def resample(traj: Trajectory, dt: float) -> Trajectory:
    """Linear-in-time interpolation onto ``t0, t0 + dt, ...``.

    The final sample time is appended when it does not fall on the grid, so
    terminal events survive resampling. Heading is interpolated unwrapped.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    t0, t1 = float(traj.t[0]), float(traj.t[-1])
    n = int(math.floor((t1 - t0) / dt + 1e-9))
    grid = t0 + dt * np.arange(n + 1)
    if t1 - grid[-1] > 1e-9 * max(1.0, abs(t1)):
        grid = np.append(grid, t1)
    else:
        grid[-1] = min(grid[-1], t1)

    def lerp(col):
        return np.interp(grid, traj.t, col)

    theta = np.unwrap(traj.states[:, 2])
    states = np.column_stack([lerp(traj.states[:, 0]), lerp(traj.states[:, 1]), lerp(theta)])
    states[:, 2] = np.remainder(states[:, 2] + math.pi, 2 * math.pi) - math.pi
    states[states[:, 2] == -math.pi, 2] = math.pi
    return replace(
        traj,
        t=grid,
        states=states,
        v=lerp(traj.v),
        omega=lerp(traj.omega),
        v_r=lerp(traj.v_r),
        v_l=lerp(traj.v_l),
        det_guard=lerp(traj.det_guard),
        meta=dict(traj.meta),
    )
