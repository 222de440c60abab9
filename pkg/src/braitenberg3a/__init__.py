"""Simulation and analysis of Braitenberg vehicle 3a with a stimulus-rate term."""

from .analysis import (
    ComparisonMetrics,
    EigenReport,
    EquilibriumKind,
    EquilibriumSet,
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
from .controller import (
    SingularCoupling,
    SingularState,
    Twist,
    VehicleConfig,
    WheelSpeeds,
    body_frame,
    sensor_positions,
    solve_wheel_speeds,
    twist_from_state_derivative,
    wheel_speeds_given_twist,
)
from .dynamics import (
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
from .field import GaussianProfile, ParabolicStimulus, QuadraticProfile, check_derivatives
from .integrate import (
    IntegratorConfig,
    Method,
    Termination,
    Trajectory,
    consistent_initialization,
    integrate,
    resample,
)

__version__ = "0.1.0"
