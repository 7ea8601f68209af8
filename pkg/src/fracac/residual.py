"""Residual of the radial layer ansatz in the time-fractional Allen-Cahn equation.

The ansatz is ``v(r, t) = gamma((r - phi0(t)) / eps)`` and the residual is

    E = eps^alpha D^alpha v - eps * Lap v - f(v) / eps

with ``D^alpha`` the unnormalised Caputo derivative and ``Lap`` the radial
Laplacian in ``n`` dimensions.  After the profile ODE cancels the ``1/eps``
terms this reduces to

    E = -eps^(alpha-1) * M(r, t) - (n-1)/r * gamma'((r - phi0(t)) / eps),
    M(r, t) = int_0^t phi0'(tau) (t-tau)^-alpha gamma'((r - phi0(tau)) / eps) dtau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .caputo import caputo_direct
from .constants import StructuralConstants, structural_constants
from .errors import DegenerateFit, DomainError, NumericalFailure, OriginSingularity
from .params import ModelParams
from .profile import f, gamma, gamma_prime, gamma_second
from .sphere_flow import SphereFlow

REGIMES = ("interface", "outside", "inside")


def default_mu(alpha: float) -> float:
    """Midpoint of the admissible window exponent range ``(1 - alpha, 1)``."""
    return (2.0 - alpha) / 2.0


@dataclass(frozen=True)
class Ansatz:
    params: ModelParams
    constants: StructuralConstants
    flow: SphereFlow

    @classmethod
    def build(cls, alpha: float, n: int, eps: float, tol: float = 1e-10) -> Ansatz:
        params = ModelParams(alpha, n, eps)
        consts = structural_constants(alpha, n, tol)
        return cls(params, consts, SphereFlow(alpha, consts.C_alpha))

    def with_eps(self, eps: float) -> Ansatz:
        return Ansatz(ModelParams(self.params.alpha, self.params.n, eps), self.constants, self.flow)

    @property
    def extinction_time(self) -> float:
        return self.flow.extinction_time


def ansatz_value(r, t, ansatz: Ansatz):
    return gamma((np.asarray(r, dtype=float) - ansatz.flow.radius(t)) / ansatz.params.eps)


def ansatz_time_derivative(r, t, ansatz: Ansatz):
    eps = ansatz.params.eps
    z = (np.asarray(r, dtype=float) - ansatz.flow.radius(t)) / eps
    return -ansatz.flow.velocity(t) / eps * gamma_prime(z)


def radial_laplacian_of_ansatz(r, t, ansatz: Ansatz):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise OriginSingularity("the radial Laplacian formula is singular at r = 0")
    eps, n = ansatz.params.eps, ansatz.params.n
    z = (r - ansatz.flow.radius(t)) / eps
    return gamma_second(z) / eps**2 + (n - 1) / (eps * r) * gamma_prime(z)


def memory_integral(r: float, t: float, ansatz: Ansatz, tol: float = 1e-10) -> float:
    """``M(r, t)``: the kernel-weighted history of ``phi0' * gamma'`` at fixed ``r``.

    Sharp features: the kernel singularity at ``tau = t`` (handled by the
    quadrature) and the peak of ``gamma'`` at ``tau = psi0(r)`` when
    ``phi0(t) < r < 1``, which is seeded into the panel layout.
    """
    if t <= 0:
        raise DomainError("t must be positive")
    flow, eps = ansatz.flow, ansatz.params.eps
    flow.radius(t)  # domain check
    if flow.C_alpha == 0.0:
        return 0.0
    r = float(r)

    def integrand(tau):
        return flow.velocity(tau) * gamma_prime((r - flow.radius(tau)) / eps)

    points = []
    phi_t = float(flow.radius(t))
    if phi_t < r < 1.0:
        tau_star = float(flow.inverse(r))
        width = eps / abs(float(flow.velocity(tau_star)))
        points = [tau_star + k * width for k in range(-8, 9)]
    # peak width near tau = t, where the interface sits when r ~ phi0(t)
    width_t = eps / abs(float(flow.velocity(t)))
    points += [t - k * width_t for k in (1, 2, 4, 8, 16, 32)]
    return caputo_direct(integrand, t, ansatz.params.alpha, tol=tol, points=points)


def caputo_of_ansatz(r: float, t: float, ansatz: Ansatz, tol: float = 1e-10) -> float:
    """Unnormalised Caputo derivative of the ansatz in time, ``-M(r, t) / eps``."""
    return -memory_integral(r, t, ansatz, tol) / ansatz.params.eps


@dataclass(frozen=True)
class ResidualValue:
    reduced: float
    unreduced: float


def residual_forms(r: float, t: float, ansatz: Ansatz, tol: float = 1e-10) -> ResidualValue:
    """Both the reduced and the full expression of the residual."""
    if r <= 0:
        raise OriginSingularity("the residual is evaluated for r > 0 only")
    if t <= 0:
        raise DomainError("t must be positive")
    alpha, n, eps = ansatz.params.alpha, ansatz.params.n, ansatz.params.eps
    mem = memory_integral(r, t, ansatz, tol)
    z = (r - float(ansatz.flow.radius(t))) / eps
    reduced = -eps ** (alpha - 1.0) * mem - (n - 1) / r * float(gamma_prime(z))
    v = float(gamma(z))
    unreduced = (eps**alpha * (-mem / eps)
                 - eps * float(radial_laplacian_of_ansatz(r, t, ansatz))
                 - float(f(v)) / eps)
    return ResidualValue(reduced, unreduced)


def residual_E(r: float, t: float, ansatz: Ansatz, tol: float = 1e-10) -> float:
    """Residual of the ansatz, cross-checked against the unreduced form."""
    vals = residual_forms(r, t, ansatz, tol)
    eps = ansatz.params.eps
    # the two forms differ by (gamma'' + f(gamma))/eps plus rounding of O(1/eps) terms
    slack = max(tol / eps, 64 * np.finfo(float).eps * (1.0 + 1.0 / eps**2))
    if abs(vals.reduced - vals.unreduced) > slack:
        raise NumericalFailure(
            f"reduced and unreduced residuals disagree: {vals.reduced!r} vs {vals.unreduced!r}")
    return vals.reduced


def fit_scaling_exponent(samples) -> tuple[float, float]:
    """Least-squares slope of ``log|E|`` against ``log eps``.

    Returns ``(exponent, fit_residual)`` where the residual is the RMS
    deviation of the log-data from the fitted line.
    """
    data = np.asarray(list(samples), dtype=float)
    if data.ndim != 2 or data.shape[0] < 4 or data.shape[1] != 2:
        raise DegenerateFit("need at least 4 (eps, |E|) pairs")
    eps, err = data[:, 0], np.abs(data[:, 1])
    if not (np.all(np.isfinite(err)) and np.all(err > 0) and np.all(eps > 0)):
        raise DegenerateFit("every |E| must be finite and nonzero")
    x, y = np.log(eps), np.log(err)
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return float(slope), resid


@dataclass
class ResidualReport:
    regime: str
    samples: list = field(default_factory=list)  # (r, t, eps, E)
    mu: float = float("nan")
    fitted_exponent: float = float("nan")
    fit_residual: float = float("nan")


def residual_scan(alpha: float, n: int, t: float, eps_list, regime: str = "interface",
                  r: float | None = None, offset: float = 0.2, tol: float = 1e-10,
                  mu: float | None = None) -> ResidualReport:
    """Residual samples along an eps sweep at fixed ``t`` for one regime.

    ``interface`` evaluates at ``r = phi0(t)`` computed from the closed form.
    ``outside``/``inside`` use the given ``r`` or ``phi0(t) +/- offset``.
    """
    if regime not in REGIMES:
        raise DomainError(f"regime must be one of {REGIMES}, got {regime!r}")
    base = Ansatz.build(alpha, n, eps_list[0], tol)
    phi_t = float(base.flow.radius(t))
    if regime == "interface":
        r_eval = phi_t
    else:
        sign = 1.0 if regime == "outside" else -1.0
        r_eval = phi_t + sign * offset if r is None else float(r)
        if sign * (r_eval - phi_t) <= 0:
            raise DomainError(f"r={r_eval:g} is not on the {regime} side of phi0(t)={phi_t:g}")
        if r_eval <= 0:
            raise DomainError("r must be positive")
    report = ResidualReport(regime, mu=default_mu(alpha) if mu is None else mu)
    for eps in eps_list:
        E = residual_E(r_eval, t, base.with_eps(eps), tol)
        report.samples.append((r_eval, t, eps, E))
    report.samples.sort(key=lambda s: (s[2], s[1], s[0]))
    pairs = [(s[2], s[3]) for s in report.samples]
    try:
        report.fitted_exponent, report.fit_residual = fit_scaling_exponent(pairs)
    except DegenerateFit:
        pass
    return report
