"""Radius of a sphere shrinking by the ``1/alpha`` power of its mean curvature.

The radius solves ``phi' = -C / phi**(1/alpha)``, ``phi(0) = 1``, whose
separable solution is

    phi(t) = (1 - (alpha+1)/alpha * C * t) ** (alpha/(alpha+1))

and vanishes at the extinction time ``alpha / ((alpha+1) C)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, OutOfRange, PastExtinction, StepSizeTooLarge


def extinction_time(alpha: float, C_alpha: float) -> float:
    if C_alpha <= 0:
        return math.inf
    return alpha / ((alpha + 1.0) * C_alpha)


def _check_times(t, alpha, C_alpha):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("time must be nonnegative")
    T = extinction_time(alpha, C_alpha)
    if np.any(t >= T):
        raise PastExtinction(f"t={np.max(t):g} is not before the extinction time {T:g}")
    return t


def phi0_closed_form(t, alpha: float, C_alpha: float):
    t = _check_times(t, alpha, C_alpha)
    k = (alpha + 1.0) / alpha
    return (1.0 - k * C_alpha * t) ** (1.0 / k)


def phi0_dot(t, alpha: float, C_alpha: float):
    """Analytic time derivative of :func:`phi0_closed_form`."""
    phi = phi0_closed_form(t, alpha, C_alpha)
    return -C_alpha / phi ** (1.0 / alpha)


def psi0(r, alpha: float, C_alpha: float):
    """Inverse of the radius map: the time at which the radius equals ``r``."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0) or np.any(r > 1):
        raise OutOfRange("r must lie in (0, 1]")
    if C_alpha <= 0:
        raise DomainError("the radius is constant when C_alpha = 0; no inverse exists")
    k = (alpha + 1.0) / alpha
    return (1.0 - r**k) / (k * C_alpha)


@dataclass(frozen=True)
class SphereFlow:
    """Closed-form flow context bound to one ``(alpha, C_alpha)`` pair."""

    alpha: float
    C_alpha: float

    @property
    def extinction_time(self) -> float:
        return extinction_time(self.alpha, self.C_alpha)

    def radius(self, t):
        return phi0_closed_form(t, self.alpha, self.C_alpha)

    def velocity(self, t):
        return phi0_dot(t, self.alpha, self.C_alpha)

    def inverse(self, r):
        return psi0(r, self.alpha, self.C_alpha)


@dataclass(frozen=True)
class FlowTrajectory:
    alpha: float
    C_alpha: float
    times: np.ndarray
    radii: np.ndarray
    extinction_time: float

    def __post_init__(self):
        self.times.setflags(write=False)
        self.radii.setflags(write=False)

    def check_invariants(self) -> None:
        t, r = self.times, self.radii
        assert t[0] == 0.0 and r[0] == 1.0
        assert np.all(np.diff(t) > 0) and np.all(t < self.extinction_time)
        if self.C_alpha > 0:
            assert np.all(np.diff(r) < 0)
        else:
            assert np.all(r == 1.0)


def phi0_rk4(t_max: float, dt: float, alpha: float, C_alpha: float) -> FlowTrajectory:
    """Classical RK4 integration of the radius ODE on a uniform grid ending at ``t_max``.

    The step is shrunk slightly so that an integer number of steps lands on
    ``t_max`` exactly.
    """
    if dt <= 0:
        raise DomainError("dt must be positive")
    T = extinction_time(alpha, C_alpha)
    if t_max >= T - 10.0 * dt:
        raise PastExtinction(f"t_max={t_max:g} is within 10 steps of extinction at {T:g}")
    steps = max(1, math.ceil(t_max / dt - 1e-12))
    h = t_max / steps
    expo = 1.0 / alpha

    def rhs(phi):
        if phi <= 0:
            raise StepSizeTooLarge("radius became nonpositive during RK4 integration")
        return -C_alpha / phi**expo

    radii = np.empty(steps + 1)
    radii[0] = phi = 1.0
    for i in range(steps):
        k1 = rhs(phi)
        k2 = rhs(phi + 0.5 * h * k1)
        k3 = rhs(phi + 0.5 * h * k2)
        k4 = rhs(phi + h * k3)
        phi = phi + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        if phi <= 0:
            raise StepSizeTooLarge("radius became nonpositive during RK4 integration")
        radii[i + 1] = phi
    times = h * np.arange(steps + 1)
    return FlowTrajectory(alpha, C_alpha, times, radii, T)
