"""Structural constants of the fractional layer balance.

``c_alpha`` is the weakly singular integral

    c_alpha = int_{-inf}^0 gamma'(s) / |s|**alpha ds = int_0^inf gamma'(s) s**-alpha ds

and ``C_alpha = ((n - 1) gamma'(0) / c_alpha) ** (1/alpha)`` is the speed
coefficient of the sphere flow.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .errors import DomainError, NonConvergence
from .profile import GAMMA_PRIME_0, gamma_prime

#: gamma'(-40) ~ 4e-25; the integrand is negligible beyond this point.
TAIL_CUTOFF = 40.0

_MAX_JACOBI_NODES = 1024
_MAX_PANELS = 1 << 14
_PANEL_ORDER = 16


@dataclass(frozen=True)
class StructuralConstants:
    alpha: float
    n: int
    c_alpha: float
    C_alpha: float
    quadrature_error_estimate: float

    @classmethod
    def compute(cls, alpha: float, n: int, tol: float = 1e-10) -> StructuralConstants:
        c, err = c_alpha_with_error(alpha, tol)
        return cls(alpha, n, c, compute_C_alpha(alpha, n, c), err)


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0,1), got {alpha!r}")


def _head_jacobi(alpha, tol):
    """int_0^1 gamma'(s) s^-alpha ds with the s^-alpha weight built into the rule."""
    # s = (1+x)/2  =>  s^-alpha ds = 2^(alpha-1) (1+x)^-alpha dx
    scale = 2.0 ** (alpha - 1.0)

    def rule(m):
        x, w = roots_jacobi(m, 0.0, -alpha)
        return scale * float(np.dot(w, gamma_prime(0.5 * (1.0 + x))))

    m = 8
    prev = rule(m)
    while m < _MAX_JACOBI_NODES:
        m *= 2
        cur = rule(m)
        err = abs(cur - prev)
        if err <= 0.5 * tol:
            return cur, err
        prev = cur
    raise NonConvergence(f"Gauss-Jacobi head did not reach tol={tol:g} (alpha={alpha})")


def _composite_gl(func, a, b, tol, what):
    """Composite Gauss-Legendre on [a, b], doubling the panel count until stable."""
    x, w = roots_legendre(_PANEL_ORDER)

    def rule(panels):
        edges = np.linspace(a, b, panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        nodes = mid[:, None] + half[:, None] * x[None, :]
        return float(np.sum(half[:, None] * w[None, :] * func(nodes)))

    panels = 4
    prev = rule(panels)
    while panels < _MAX_PANELS:
        panels *= 2
        cur = rule(panels)
        err = abs(cur - prev)
        if err <= 0.5 * tol:
            return cur, err
        prev = cur
    raise NonConvergence(f"{what} did not reach tol={tol:g}")


def c_alpha_with_error(alpha: float, tol: float = 1e-10, method: str = "jacobi",
                       cutoff: float = TAIL_CUTOFF) -> tuple[float, float]:
    """Return ``(c_alpha, error_estimate)``.

    ``method="jacobi"`` splits at ``s = 1`` and uses a Gauss-Jacobi rule for
    the singular head and composite Gauss-Legendre for the tail up to
    ``cutoff``.  ``method="substitution"`` maps ``s = u**(1/(1-alpha))``,
    which cancels the singularity, and integrates the smooth result with
    composite Gauss-Legendre.  The two routes share no quadrature code.
    """
    _check_alpha(alpha)
    if tol <= 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    if method == "jacobi":
        head, e1 = _head_jacobi(alpha, tol)
        tail, e2 = _composite_gl(lambda s: gamma_prime(s) * s ** (-alpha), 1.0, cutoff,
                                 tol, "tail quadrature")
        return head + tail, e1 + e2
    if method == "substitution":
        p = 1.0 / (1.0 - alpha)
        val, err = _composite_gl(lambda u: gamma_prime(u**p) * p, 0.0,
                                 cutoff ** (1.0 - alpha), tol, "substitution quadrature")
        # ds = p u^(p-1) du and s^-alpha = u^(-alpha p) = u^(1-p)
        return val, err
    raise ValueError(f"unknown method {method!r}")


@functools.lru_cache(maxsize=256)
def _cached_c_alpha(alpha, tol):
    return c_alpha_with_error(alpha, tol)


def compute_c_alpha(alpha: float, tol: float = 1e-10) -> float:
    """The constant ``c_alpha`` to absolute accuracy ``tol`` (cached per process)."""
    return _cached_c_alpha(float(alpha), float(tol))[0]


def compute_C_alpha(alpha: float, n: int, c_alpha: float) -> float:
    _check_alpha(alpha)
    if n < 1 or int(n) != n:
        raise DomainError(f"n must be an integer >= 1, got {n!r}")
    if not c_alpha > 0:
        raise DomainError(f"c_alpha must be positive, got {c_alpha!r}")
    return ((n - 1) * GAMMA_PRIME_0 / c_alpha) ** (1.0 / alpha)


def structural_constants(alpha: float, n: int, tol: float = 1e-10) -> StructuralConstants:
    c, err = _cached_c_alpha(float(alpha), float(tol))
    return StructuralConstants(alpha, int(n), c, compute_C_alpha(alpha, n, c), err)

