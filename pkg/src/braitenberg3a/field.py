"""Analytic stimulus fields with exact first and second derivatives.

The only family implemented is the parabolic one, ``S(x) = s(x^T D x)`` with a
diagonal positive ``D``, where ``s`` is a radial profile of the quadratic form
``q = x^T D x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "GaussianProfile",
    "QuadraticProfile",
    "PROFILES",
    "ParabolicStimulus",
    "DerivativeCheckReport",
    "check_derivatives",
    "fd_gradient",
    "fd_hessian",
]


@dataclass(frozen=True)
class GaussianProfile:
    """Radial profile ``s(q) = amplitude * exp(-q)``.

    Positive, strictly decreasing on ``q >= 0`` and maximal at ``q = 0``.
    """

    amplitude: float = 1.0
    kind: str = "gaussian"

    def __post_init__(self):
        if not self.amplitude > 0:
            raise ValueError(f"profile amplitude must be positive, got {self.amplitude}")
        if self.kind != "gaussian":
            raise ValueError(f"unsupported profile kind {self.kind!r}")

    def s(self, q: float) -> float:
        return self.amplitude * math.exp(-q)

    def ds(self, q: float) -> float:
        return -self.amplitude * math.exp(-q)

    def d2s(self, q: float) -> float:
        return self.amplitude * math.exp(-q)

    def max_gradient_norm(self, sigma: float) -> float:
        # 2 A sigma r exp(-sigma r^2) peaks at r = 1/sqrt(2 sigma)
        return self.amplitude * math.sqrt(2.0 * sigma) * math.exp(-0.5)


@dataclass(frozen=True)
class QuadraticProfile:
    """Profile ``s(q) = amplitude - q``.

    Only a local model: it is positive for ``q < amplitude`` and its gradient
    is unbounded, so no ``alpha > 0`` is admissible with it.
    """

    amplitude: float = 1.0
    kind: str = "quadratic"

    def __post_init__(self):
        if not self.amplitude > 0:
            raise ValueError(f"profile amplitude must be positive, got {self.amplitude}")

    def s(self, q: float) -> float:
        return self.amplitude - q

    def ds(self, q: float) -> float:
        return -1.0

    def d2s(self, q: float) -> float:
        return 0.0

    def max_gradient_norm(self, sigma: float) -> float:
        return math.inf


PROFILES = {"gaussian": GaussianProfile, "quadratic": QuadraticProfile}


@dataclass(frozen=True)
class ParabolicStimulus:
    """Stimulus ``S(p) = s(p^T D p)`` with ``D = diag(sigma_x, sigma_y)``.

    Parameters
    ----------
    profile : GaussianProfile or QuadraticProfile
        Radial profile of the quadratic form.
    sigma_x, sigma_y : float
        Positive diagonal entries of ``D``.
    """

    profile: GaussianProfile | QuadraticProfile = GaussianProfile()
    sigma_x: float = 0.05
    sigma_y: float = 0.1

    def __post_init__(self):
        if not (self.sigma_x > 0 and self.sigma_y > 0):
            raise ValueError(
                f"shape entries must be positive, got sigma_x={self.sigma_x}, sigma_y={self.sigma_y}"
            )

    @property
    def amplitude(self) -> float:
        return self.profile.amplitude

    @property
    def shape(self) -> np.ndarray:
        return np.diag([self.sigma_x, self.sigma_y])

    @property
    def is_circular(self) -> bool:
        return self.sigma_x == self.sigma_y

    def quad(self, p) -> float:
        x, y = p
        return self.sigma_x * x * x + self.sigma_y * y * y

    def value(self, p) -> float:
        return self.profile.s(self.quad(p))

    def gradient(self, p) -> np.ndarray:
        """Exact gradient ``2 s'(q) D p``."""
        x, y = p
        c = 2.0 * self.profile.ds(self.quad(p))
        return np.array([c * self.sigma_x * x, c * self.sigma_y * y])

    def hessian(self, p) -> np.ndarray:
        """Exact Hessian ``4 s''(q) (Dp)(Dp)^T + 2 s'(q) D``."""
        x, y = p
        q = self.quad(p)
        a = 4.0 * self.profile.d2s(q)
        b = 2.0 * self.profile.ds(q)
        dx, dy = self.sigma_x * x, self.sigma_y * y
        hxy = a * dx * dy
        return np.array([[a * dx * dx + b * self.sigma_x, hxy], [hxy, a * dy * dy + b * self.sigma_y]])

    def max_gradient_norm(self) -> float:
        """Supremum of ``|grad S|`` over the plane.

        For fixed ``q`` the norm ``2|s'(q)| |Dp|`` is largest when all of ``q``
        sits on the axis with the larger sigma, which reduces the search to a
        1-D profile maximisation along that axis.
        """
        return self.profile.max_gradient_norm(max(self.sigma_x, self.sigma_y))


def fd_gradient(field: ParabolicStimulus, p, h: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of ``field.value``."""
    p = np.asarray(p, dtype=float)
    g = np.empty(2)
    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        g[i] = (field.value(p + e) - field.value(p - e)) / (2 * h)
    return g


def fd_hessian(field: ParabolicStimulus, p, h: float = 1e-4) -> np.ndarray:
    """Second-order central differences of ``field.value`` (symmetrised)."""
    p = np.asarray(p, dtype=float)
    H = np.empty((2, 2))
    f0 = field.value(p)
    for i in range(2):
        ei = np.zeros(2)
        ei[i] = h
        H[i, i] = (field.value(p + ei) - 2 * f0 + field.value(p - ei)) / h**2
    e0 = np.array([h, 0.0])
    e1 = np.array([0.0, h])
    H[0, 1] = H[1, 0] = (
        field.value(p + e0 + e1)
        - field.value(p + e0 - e1)
        - field.value(p - e0 + e1)
        + field.value(p - e0 - e1)
    ) / (4 * h * h)
    return H


class DerivativeCheckReport(NamedTuple):
    point: np.ndarray
    grad_abs_err: float
    hess_abs_err: float
    step: float


def check_derivatives(field: ParabolicStimulus, p, h: float = 1e-5, h_hess: float | None = None):
    """Compare analytic derivatives with central differences at ``p``.

    ``h`` is used for the gradient; the Hessian uses ``h_hess`` (default
    ``10 * h``, since second differences lose accuracy faster).
    """
    if not h > 0:
        raise ValueError("finite-difference step must be positive")
    p = np.asarray(p, dtype=float)
    hh = 10 * h if h_hess is None else h_hess
    g_err = float(np.max(np.abs(field.gradient(p) - fd_gradient(field, p, h))))
    h_err = float(np.max(np.abs(field.hessian(p) - fd_hessian(field, p, hh))))
    return DerivativeCheckReport(p, g_err, h_err, h)
