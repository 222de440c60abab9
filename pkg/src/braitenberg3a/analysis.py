"""Equilibria, the straight-line axis solution, frozen linearisation and
trajectory-quality metrics."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .controller import SingularState, VehicleConfig
from .dynamics import ModelKind, state_derivative
from .field import ParabolicStimulus
from .integrate import IntegratorConfig, Termination, Trajectory, _solve, resample

__all__ = [
    "EquilibriumKind",
    "EquilibriumSet",
    "equilibria",
    "AxisSolution",
    "axis_solution",
    "jacobian_fd",
    "eigvals3",
    "ClosedFormEigen",
    "eigen_closed_form",
    "EigenReport",
    "eigen_compare",
    "ComparisonMetrics",
    "IncomparableRuns",
    "trajectory_metrics",
    "compare_runs",
    "sup_norm_gap",
    "time_to_abs_x",
]


class EquilibriumKind(enum.Enum):
    CIRCULAR_CONTINUUM = "circular_continuum"
    FOUR_ISOLATED = "four_isolated"


class EquilibriumSet(NamedTuple):
    kind: EquilibriumKind
    poses: list


def equilibria(field: ParabolicStimulus, cfg: VehicleConfig, samples: int = 64) -> EquilibriumSet:
    """Headings at the source for which ``e_p^T D e = 0``.

    For a circular field every heading qualifies and the continuum is
    represented by ``samples`` evenly spaced headings. Otherwise the four
    axis-aligned headings are returned.

    Under the midpoint models (ODE/DAE) every heading at the source is
    stationary because both ``F`` and ``grad S`` vanish there; the condition
    singles out the headings whose turning rate also vanishes for the exact
    wheel law with sensors off the maximum.
    """
    if field.is_circular:
        thetas = [math.pi * (2 * k / samples - 1) for k in range(1, samples + 1)]
        kind = EquilibriumKind.CIRCULAR_CONTINUUM
    else:
        thetas = [0.0, math.pi, math.pi / 2, -math.pi / 2]
        kind = EquilibriumKind.FOUR_ISOLATED
    return EquilibriumSet(kind, [(0.0, 0.0, th) for th in thetas])


class AxisSolution(NamedTuple):
    t: np.ndarray
    x: np.ndarray
    termination: Termination


def axis_rate(x: float, field: ParabolicStimulus, cfg: VehicleConfig) -> float:
    """Speed along the x axis, ``F(s(sx x^2)) / (1 - 2 alpha s'(sx x^2) sx x)``."""
    sx = field.sigma_x
    q = sx * x * x
    den = 1.0 - 2.0 * cfg.alpha * field.profile.ds(q) * sx * x
    return cfg.F(field.profile.s(q)) / den


def axis_solution(x0: float, field: ParabolicStimulus, cfg: VehicleConfig, icfg: IntegratorConfig | None = None) -> AxisSolution:
    """Integrate the 1-D straight-line motion from ``(x0, 0, 0)``, ``x0 < 0``.

    Uses the same stepping and arrival logic as :func:`integrate`, so the
    result can be compared sample by sample with the full model.
    """
    if not x0 < 0:
        raise ValueError("axis solution needs a start on the negative x axis")
    icfg = icfg or IntegratorConfig()

    def f(y):
        x = y[0]
        sx = field.sigma_x
        den = 1.0 - 2.0 * cfg.alpha * field.profile.ds(sx * x * x) * sx * x
        if abs(den) < 1e-8:
            raise SingularState(f"axis denominator {den:.3e} at x={x}")
        return np.array([axis_rate(x, field, cfg)])

    radius = icfg.source_radius
    arrived = (lambda y: abs(y[0]) - radius) if radius > 0 else None
    ts, ys, _, term, _, _ = _solve(f, [x0], icfg, arrived)
    return AxisSolution(np.array(ts), np.array(ys)[:, 0], term)


def jacobian_fd(state, kind, field: ParabolicStimulus, cfg: VehicleConfig, h: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian of the state derivative w.r.t. ``(x, y, theta)``."""
    if not h > 0:
        raise ValueError("h must be positive")
    X = np.asarray(state, dtype=float)
    J = np.empty((3, 3))
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        J[:, j] = (state_derivative(X + e, kind, field, cfg) - state_derivative(X - e, kind, field, cfg)) / (2 * h)
    return J


def eigvals3(J) -> np.ndarray:
    """Eigenvalues of a real 3x3 matrix from its characteristic cubic.

    With one real root it comes first, followed by the conjugate pair;
    three real roots are returned in ascending order.
    """
    J = np.asarray(J, dtype=float)
    a = -np.trace(J)
    b = (
        J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
        + J[0, 0] * J[2, 2] - J[0, 2] * J[2, 0]
        + J[1, 1] * J[2, 2] - J[1, 2] * J[2, 1]
    )
    c = -np.linalg.det(J)
    # depressed cubic t^3 + p t + q, lambda = t - a/3
    p = b - a * a / 3.0
    q = 2.0 * a**3 / 27.0 - a * b / 3.0 + c
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    shift = -a / 3.0
    if disc > 0:
        sq = math.sqrt(disc)
        u = np.cbrt(-q / 2.0 + sq)
        v = np.cbrt(-q / 2.0 - sq)
        re = -(u + v) / 2.0 + shift
        im = math.sqrt(3.0) / 2.0 * (u - v)
        roots = [complex(u + v + shift, 0.0), complex(re, abs(im)), complex(re, -abs(im))]
    elif p == 0.0:
        roots = [complex(shift, 0.0)] * 3
    else:
        r = 2.0 * math.sqrt(-p / 3.0)
        arg = max(-1.0, min(1.0, 3.0 * q / (p * r)))
        phi = math.acos(arg) / 3.0
        roots = sorted((complex(r * math.cos(phi - 2.0 * math.pi * k / 3.0) + shift, 0.0) for k in range(3)), key=lambda z: z.real)
    return np.array(roots)


class ClosedFormEigen(NamedTuple):
    lambda1: float
    re_lambda23: float
    delta1: float
    delta2: float
    variants: dict


def eigen_closed_form(x: float, field: ParabolicStimulus, cfg: VehicleConfig) -> ClosedFormEigen:
    """Frozen-linearisation eigenvalues along the axis solution at ``(x, 0, 0)``.

    The Jacobian there is block diagonal: a real eigenvalue from ``dxdot/dx``
    and a 2x2 ``(y, theta)`` block whose trace gives twice the real part of
    the remaining pair.

    ``re_lambda23`` uses ``delta2 = d + 2 alpha delta sx x s'`` (the turning
    denominator on the axis) and subtracts the shape term. ``variants`` also
    carries the two alternative sign conventions:

    ``"reversed_denominator"``
        ``delta2 = d - 2 alpha delta sx x s'``, shape term added.
    ``"turning_denominator"``
        ``delta2 = d + 2 alpha delta sx x s'``, shape term added.
    ``"consistent"``
        Same as ``re_lambda23``.
    """
    sx, sy = field.sigma_x, field.sigma_y
    a, delta, d = cfg.alpha, cfg.delta, cfg.wheelbase
    q = sx * x * x
    s = field.profile.s(q)
    s1 = field.profile.ds(q)
    s2 = field.profile.d2s(q)
    Fv = cfg.F(s)
    F1 = cfg.dF(s)

    d1 = 1.0 - 2.0 * a * sx * x * s1
    lam1 = 2.0 * sx * x * F1 * s1 / d1 + 2.0 * a * sx * Fv * (s1 + 2.0 * sx * x * x * s2) / d1**2

    shape = s1 * (sx - sy) + 2.0 * s2 * sx * sx * x * x
    d2_plus = d + 2.0 * a * delta * sx * x * s1
    d2_minus = d - 2.0 * a * delta * sx * x * s1

    def re23(d2, sign):
        return delta * sx * x * F1 * s1 / d2 + sign * a * delta * Fv * shape / (d1 * d2)

    variants = {
        "reversed_denominator": re23(d2_minus, 1.0),
        "turning_denominator": re23(d2_plus, 1.0),
        "consistent": re23(d2_plus, -1.0),
    }
    return ClosedFormEigen(lam1, variants["consistent"], d1, d2_plus, variants)


@dataclass
class EigenReport:
    x: float
    delta1: float
    delta2: float
    lambda1_closed: float
    re_lambda23_closed: float
    eigs_numeric: np.ndarray
    lambda1_numeric: float
    re_lambda23_numeric: float
    variants: dict
    variant_rel_err: dict

    @property
    def lambda1_rel_err(self) -> float:
        return abs(self.lambda1_closed - self.lambda1_numeric) / abs(self.lambda1_numeric)

    def matching_variants(self, rtol: float = 1e-3) -> list:
        return [k for k, e in self.variant_rel_err.items() if e < rtol]


def eigen_compare(x: float, field: ParabolicStimulus, cfg: VehicleConfig, h: float = 1e-5) -> EigenReport:
    """Closed-form eigenvalues at ``(x, 0, 0)`` next to those of the FD Jacobian."""
    cf = eigen_closed_form(x, field, cfg)
    J = jacobian_fd((x, 0.0, 0.0), ModelKind.ODE, field, cfg, h)
    eigs = eigvals3(J)
    # the axis eigenvalue is J[0, 0] structurally; pick the root nearest to it
    i1 = int(np.argmin(np.abs(eigs - J[0, 0])))
    lam1 = eigs[i1].real
    rest = np.delete(eigs, i1)
    re23 = float(np.mean(rest.real))
    scale = max(abs(re23), 1e-300)
    rel = {k: abs(v - re23) / scale for k, v in cf.variants.items()}
    return EigenReport(x, cf.delta1, cf.delta2, cf.lambda1, cf.re_lambda23, eigs, lam1, re23, cf.variants, rel)


class IncomparableRuns(ValueError):
    pass


@dataclass
class ComparisonMetrics:
    time_to_ball: float
    path_length: float
    max_lateral_overshoot: float
    oscillation_amplitudes: list

    @property
    def first_amplitude(self) -> float:
        return self.oscillation_amplitudes[0] if self.oscillation_amplitudes else 0.0


def trajectory_metrics(traj: Trajectory, ball: float, dt: float = 0.01) -> ComparisonMetrics:
    """Metrics of ``traj`` up to its first entry into the disc of radius ``ball``.

    Lateral oscillation is read off ``y``: amplitudes are the local maxima of
    ``|y|`` after the first crossing of the x axis.
    """
    r_traj = resample(traj, dt)
    t = r_traj.t
    P = r_traj.states[:, :2]
    r = np.hypot(P[:, 0], P[:, 1])
    inside = np.nonzero(r <= ball * (1 + 1e-9))[0]
    if inside.size:
        k = int(inside[0])
        if k == 0:
            t_ball, P = t[0], P[:1]
        else:
            # linear crossing inside the last segment
            w = (r[k - 1] - ball) / (r[k - 1] - r[k]) if r[k - 1] != r[k] else 1.0
            w = min(max(w, 0.0), 1.0)
            t_ball = t[k - 1] + w * (t[k] - t[k - 1])
            P = np.vstack([P[:k], P[k - 1] + w * (P[k] - P[k - 1])])
    else:
        t_ball = math.inf
    length = float(np.sum(np.hypot(np.diff(P[:, 0]), np.diff(P[:, 1]))))

    y = P[:, 1]
    sign = np.sign(y)
    cross = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    if cross.size:
        tail = np.abs(y[cross[0] + 1 :])
        overshoot = float(tail.max())
        peaks = np.nonzero((tail[1:-1] > tail[:-2]) & (tail[1:-1] >= tail[2:]))[0] + 1
        amps = [float(tail[i]) for i in peaks]
    else:
        overshoot, amps = 0.0, []
    return ComparisonMetrics(float(t_ball), length, overshoot, amps)


def compare_runs(a: Trajectory, b: Trajectory, ball: float, dt: float = 0.01):
    """Metrics for two runs from the same start, on a common resampling step."""
    if np.max(np.abs(a.states[0, :2] - b.states[0, :2])) > 1e-9:
        raise IncomparableRuns(f"start positions differ: {a.states[0, :2]} vs {b.states[0, :2]}")
    return trajectory_metrics(a, ball, dt), trajectory_metrics(b, ball, dt)


def sup_norm_gap(a: Trajectory, b: Trajectory, dt: float = 0.01, horizon: float | None = None) -> float:
    """Largest pose difference between two runs over their common time span.

    Both runs are resampled onto the same grid; heading differences are
    wrapped before taking the maximum.
    """
    t_end = min(a.t[-1], b.t[-1]) if horizon is None else horizon
    grid = np.arange(0.0, t_end + 0.5 * dt, dt)
    grid = grid[grid <= t_end]
    if grid[-1] < t_end:
        grid = np.append(grid, t_end)

    def at(tr):
        th = np.unwrap(tr.states[:, 2])
        return np.column_stack([np.interp(grid, tr.t, tr.states[:, i]) for i in (0, 1)] + [np.interp(grid, tr.t, th)])

    da, db = at(a), at(b)
    diff = da - db
    diff[:, 2] = np.remainder(diff[:, 2] + math.pi, 2 * math.pi) - math.pi
    return float(np.max(np.abs(diff)))


def time_to_abs_x(traj: Trajectory, level: float) -> float:
    """First time with ``|x| < level`` (linear between samples), ``inf`` if never."""
    ax = np.abs(traj.x)
    idx = np.nonzero(ax < level)[0]
    if not idx.size:
        return math.inf
    k = int(idx[0])
    if k == 0:
        return float(traj.t[0])
    w = (ax[k - 1] - level) / (ax[k - 1] - ax[k])
    return float(traj.t[k - 1] + w * (traj.t[k] - traj.t[k - 1]))
