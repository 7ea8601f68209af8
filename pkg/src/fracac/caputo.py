"""Caputo derivative without the ``1/Gamma(1-alpha)`` normalisation.

    D^alpha u(t) = int_0^t u'(tau) (t - tau)**(-alpha) dtau

Two evaluation routes are provided: adaptive quadrature of a known
``u'`` (:func:`caputo_direct`) and the L1 scheme acting on a uniformly
sampled history (:func:`l1_apply`).  Multiplying either by
``1/Gamma(1-alpha)`` gives the textbook Caputo derivative.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import roots_jacobi, roots_legendre

from .errors import DomainError, NonConvergence

_ORDER = 12


@dataclass(frozen=True)
class L1Weights:
    alpha: float
    dt: float
    w: np.ndarray  # w[j-1] is w_j, j = 1..m


@dataclass
class TimeHistory:
    """Uniformly sampled states ``u^0, ..., u^m``; ``values[0]`` is the datum at t=0.

    ``values`` has shape ``(m+1,)`` for a scalar state or ``(m+1, nodes)``.
    """

    dt: float
    values: np.ndarray
    alpha: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim == 0 or len(self.values) < 1:
            raise DomainError("a time history needs at least the initial state")
        if self.dt <= 0:
            raise DomainError("dt must be positive")

    @property
    def steps(self) -> int:
        return len(self.values) - 1

    @property
    def time(self) -> float:
        return self.steps * self.dt


def l1_weights(m: int, dt: float, alpha: float) -> L1Weights:
    if m < 1:
        raise DomainError("m must be >= 1")
    if dt <= 0:
        raise DomainError("dt must be positive")
    j = np.arange(m + 1, dtype=float)
    p = j ** (1.0 - alpha)
    w = np.diff(p) * dt ** (1.0 - alpha) / (1.0 - alpha)
    return L1Weights(alpha, dt, w)


def l1_apply(history: TimeHistory, weights: L1Weights | None = None):
    """L1 approximation of the Caputo derivative at the last stored time.

    Computes ``sum_{k=0}^{m-1} w_{m-k} (u^{k+1} - u^k) / dt``.
    """
    m = history.steps
    if m < 1:
        raise DomainError("need at least two samples")
    if weights is None:
        weights = l1_weights(m, history.dt, history.alpha)
    incr = np.diff(history.values, axis=0) / history.dt
    return np.tensordot(weights.w[m - 1::-1], incr, axes=1)


def caputo_of_monomial(p: float, t: float, alpha: float) -> float:
    """Exact Caputo derivative of ``t**p`` in the unnormalised convention."""
    if p <= 0 or t <= 0:
        raise DomainError("p and t must be positive")
    return gamma_fn(p + 1) * gamma_fn(1 - alpha) / gamma_fn(p + 1 - alpha) * t ** (p - alpha)


class _Rules:
    def __init__(self, alpha, order):
        self.xg, self.wg = roots_legendre(order)
        self.xj, self.wj = roots_jacobi(order, -alpha, 0.0)
        self.alpha = alpha


def _panel(func, t, a, b, rules):
    """Kernel-weighted integral over [a, b]; the Jacobi rule is used when b == t."""
    alpha = rules.alpha
    if b == t:
        h = b - a
        tau = a + 0.5 * h * (1.0 + rules.xj)
        return (0.5 * h) ** (1.0 - alpha) * float(np.dot(rules.wj, func(tau)))
    half = 0.5 * (b - a)
    tau = 0.5 * (a + b) + half * rules.xg
    return half * float(np.dot(rules.wg, func(tau) * (t - tau) ** (-alpha)))


def caputo_direct(du_dt: Callable[[np.ndarray], np.ndarray], t: float, alpha: float,
                  tol: float = 1e-10, points: Iterable[float] = (),
                  initial_panels: int = 8, max_panels: int = 20000) -> float:
    """Adaptive quadrature of ``int_0^t du_dt(tau) (t-tau)^-alpha dtau``.

    ``du_dt`` must accept a numpy array of times.  ``points`` are interior
    locations where the integrand varies sharply; they become panel edges.
    The panel touching ``tau = t`` carries the algebraic weight exactly
    through a Gauss-Jacobi rule and is refined geometrically by bisection.
    """
    if t <= 0:
        raise DomainError("t must be positive")
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0,1)")
    rules = _Rules(alpha, _ORDER)

    edges = sorted({0.0, float(t), *(float(p) for p in points if 0.0 < p < t)})
    heap = []
    total = 0.0
    total_err = 0.0

    def push(a, b):
        nonlocal total, total_err
        m = 0.5 * (a + b)
        coarse = _panel(du_dt, t, a, b, rules)
        fine = _panel(du_dt, t, a, m, rules) + _panel(du_dt, t, m, b, rules)
        err = abs(fine - coarse)
        total += fine
        total_err += err
        heapq.heappush(heap, (-err, a, b, fine))

    for a, b in zip(edges[:-1], edges[1:]):
        cuts = np.linspace(a, b, initial_panels + 1)
        cuts[-1] = b
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            push(float(lo), float(hi))

    while total_err > tol:
        if len(heap) >= max_panels:
            raise NonConvergence(
                f"Caputo quadrature stalled at error {total_err:.3g} > tol={tol:g} "
                f"after {len(heap)} panels")
        neg_err, a, b, fine = heapq.heappop(heap)
        total -= fine
        total_err += neg_err
        m = 0.5 * (a + b)
        if not a < m < b:
            raise NonConvergence("panel width underflow in Caputo quadrature")
        push(a, m)
        push(m, b)
    # re-sum to shed the drift of the running updates
    return math.fsum(item[3] for item in heap)
