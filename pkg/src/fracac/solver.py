"""Radial solver for the time-fractional Allen-Cahn equation

    eps^alpha D^alpha u = eps * Lap u + f(u) / eps

with ``D^alpha`` discretised by the L1 scheme and a semi-implicit step:

    eps^alpha L1(u)^m = eps * Lap_h u^m + F^m / eps.

The newest L1 increment and the Laplacian are implicit, giving one
tridiagonal solve per step.  The reaction ``F^m`` is either the
linearisation ``f(u^{m-1}) + f'(u^{m-1}) (u^m - u^{m-1})`` (default) or
the plain explicit value ``f(u^{m-1})``.  The explicit variant is unstable
near ``u = +-1`` unless ``eps^alpha dt^-alpha / (1-alpha) > 1/eps``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .caputo import L1Weights, TimeHistory, l1_weights
from .constants import structural_constants
from .errors import BlowUp, DomainError, LinearSolveFailure, UnderResolved
from .params import ModelParams
from .profile import f, gamma
from .sphere_flow import SphereFlow

#: overshoot allowed beyond [-1, 1] before a run is declared unstable
OVERSHOOT = 0.1

REACTIONS = ("linearized", "explicit")


@dataclass(frozen=True)
class RadialGrid:
    r_max: float = 2.0
    nr: int = 200

    def __post_init__(self):
        if self.nr < 16:
            raise DomainError("nr must be >= 16")
        if not self.r_max > 0:
            raise DomainError("r_max must be positive")

    @classmethod
    def from_spacing(cls, dr: float, r_max: float = 2.0) -> RadialGrid:
        return cls(r_max, int(round(r_max / dr)))

    @property
    def dr(self) -> float:
        return self.r_max / self.nr

    @property
    def nodes(self) -> np.ndarray:
        return self.dr * np.arange(self.nr + 1)


def default_dt(eps: float, alpha: float) -> float:
    """Largest step allowed by the explicit-reaction rule ``dt <= eps**(1+alpha)``."""
    return eps ** (1.0 + alpha)


def laplacian_bands(grid: RadialGrid, n: int) -> np.ndarray:
    """Tridiagonal radial Laplacian in ``solve_banded`` layout (upper, diag, lower).

    Symmetric ``n * u_rr`` at the origin, homogeneous Neumann at ``r_max``.
    """
    N, dr = grid.nr, grid.dr
    r = grid.nodes
    ab = np.zeros((3, N + 1))
    inv = 1.0 / dr**2
    i = np.arange(1, N)
    curv = (n - 1) / (2.0 * dr * r[i])
    ab[1, i] = -2.0 * inv
    ab[0, i + 1] = inv + curv   # coefficient of u_{i+1} in row i
    ab[2, i - 1] = inv - curv   # coefficient of u_{i-1} in row i
    ab[1, 0] = -2.0 * n * inv
    ab[0, 1] = 2.0 * n * inv
    ab[1, N] = -2.0 * inv
    ab[2, N - 1] = 2.0 * inv
    return ab


def apply_laplacian(u: np.ndarray, grid: RadialGrid, n: int) -> np.ndarray:
    ab = laplacian_bands(grid, n)
    out = ab[1] * u
    out[:-1] += ab[0, 1:] * u[1:]
    out[1:] += ab[2, :-1] * u[:-1]
    return out


@dataclass
class SolverState:
    params: ModelParams
    grid: RadialGrid
    dt: float
    values: np.ndarray  # (steps+1, nr+1), rows are time levels
    steps: int = 0
    reaction: str = "linearized"
    last_caputo: np.ndarray | None = None
    _weights: L1Weights | None = field(default=None, repr=False)
    _bands: np.ndarray | None = field(default=None, repr=False)

    @property
    def current_time(self) -> float:
        return self.steps * self.dt

    @property
    def current(self) -> np.ndarray:
        return self.values[self.steps]

    @property
    def history(self) -> TimeHistory:
        return TimeHistory(self.dt, self.values[: self.steps + 1], self.params.alpha)

    def reserve(self, total_steps: int) -> None:
        """Grow the history buffer (and the L1 weight table) to hold ``total_steps``."""
        if total_steps + 1 > len(self.values):
            buf = np.empty((total_steps + 1, self.grid.nr + 1))
            buf[: self.steps + 1] = self.values[: self.steps + 1]
            self.values = buf
        if self._weights is None or len(self._weights.w) < total_steps:
            self._weights = l1_weights(max(total_steps, 1), self.dt, self.params.alpha)


def initialize(params: ModelParams, grid: RadialGrid, dt: float,
               enforce_dt_rule: bool = True, reaction: str = "linearized") -> SolverState:
    """Start from the layer ``gamma((r - 1)/eps)`` centred on the unit sphere."""
    eps = params.eps
    if eps < 3.0 * grid.dr * (1 - 1e-12):
        raise UnderResolved(f"eps={eps:g} < 3*dr={3 * grid.dr:g}")
    if grid.r_max < 1.0 + 10.0 * eps - 1e-12:
        raise DomainError(f"r_max={grid.r_max:g} must be at least 1 + 10*eps")
    if not dt > 0:
        raise DomainError("dt must be positive")
    if reaction not in REACTIONS:
        raise DomainError(f"reaction must be one of {REACTIONS}")
    if enforce_dt_rule and dt > default_dt(eps, params.alpha) * (1 + 1e-12):
        raise DomainError(
            f"dt={dt:g} exceeds eps^(1+alpha)={default_dt(eps, params.alpha):g}; "
            "pass enforce_dt_rule=False to override")
    u0 = gamma((grid.nodes - 1.0) / eps)
    state = SolverState(params, grid, dt, u0[None, :].copy(), reaction=reaction)
    state._bands = laplacian_bands(grid, params.n)
    return state


def step(state: SolverState) -> SolverState:
    """Advance by one time step in place and return the state."""
    p = state.params
    alpha, eps, dt = p.alpha, p.eps, state.dt
    m = state.steps + 1
    state.reserve(m)
    w = state._weights.w
    u_prev = state.values[m - 1]

    # memory of all increments except the newest, sum_{k=0}^{m-2} w_{m-k} du^k
    if m >= 2:
        incr = np.diff(state.values[:m], axis=0) / dt
        memory = np.tensordot(w[m - 1:0:-1], incr, axes=1)
    else:
        memory = np.zeros_like(u_prev)

    a = eps**alpha * w[0] / dt
    # (a + s - eps Lap) u^m = (a + s) u^{m-1} + f(u^{m-1})/eps - eps^alpha memory
    if state.reaction == "explicit":
        s = 0.0
    else:
        s = -(1.0 - 3.0 * u_prev**2) / eps
    ab = -eps * state._bands
    ab[1] += a + s
    rhs = (a + s) * u_prev + f(u_prev) / eps - eps**alpha * memory
    try:
        u_new = solve_banded((1, 1), ab, rhs, check_finite=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - diagonally dominant for dt > 0
        raise LinearSolveFailure(str(exc)) from exc
    if not np.all(np.isfinite(u_new)) or np.max(np.abs(u_new)) > 1.0 + OVERSHOOT:
        raise BlowUp(f"solution left [-1-{OVERSHOOT}, 1+{OVERSHOOT}] at t={m * dt:g}")
    state.values[m] = u_new
    state.steps = m
    state.last_caputo = w[0] * (u_new - u_prev) / dt + memory
    return state


def extract_zero_level(values, grid_or_nodes) -> float | None:
    """Radius of the outermost sign change, by linear interpolation."""
    v = np.asarray(values, dtype=float)
    r = grid_or_nodes.nodes if isinstance(grid_or_nodes, RadialGrid) else np.asarray(grid_or_nodes)
    s = np.sign(v)
    idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
    zeros = np.nonzero(s == 0)[0]
    if len(idx) + len(zeros) == 0:
        return None
    if len(idx) + len(zeros) > 1:
        warnings.warn("values change sign more than once; using the outermost crossing",
                      RuntimeWarning, stacklevel=2)
    best = None
    if len(idx):
        i = idx[-1]
        best = r[i] - v[i] * (r[i + 1] - r[i]) / (v[i + 1] - v[i])
    if len(zeros) and (best is None or r[zeros[-1]] > best):
        best = r[zeros[-1]]
    return float(best)


@dataclass
class TrackingReport:
    times: np.ndarray
    r_star: np.ndarray  # nan where no crossing exists
    phi0: np.ndarray
    sup_error: float

    @property
    def abs_err(self) -> np.ndarray:
        return np.abs(self.r_star - self.phi0)


def solve(params: ModelParams, grid: RadialGrid, dt: float, t_end: float,
          enforce_dt_rule: bool = True, reaction: str = "linearized") -> tuple[SolverState, TrackingReport]:
    """Integrate to ``t_end`` and track the zero level set against the sphere flow."""
    consts = structural_constants(params.alpha, params.n)
    flow = SphereFlow(params.alpha, consts.C_alpha)
    if t_end > 0.5 * flow.extinction_time:
        raise DomainError(f"t_end={t_end:g} exceeds half the extinction time "
                          f"{flow.extinction_time:g}")
    state = initialize(params, grid, dt, enforce_dt_rule, reaction)
    nsteps = max(1, math.ceil(t_end / dt - 1e-9))
    state.reserve(nsteps)
    r_star = np.empty(nsteps + 1)
    r_star[0] = _level(state.current, grid)
    for k in range(1, nsteps + 1):
        step(state)
        r_star[k] = _level(state.current, grid)
    times = dt * np.arange(nsteps + 1)
    phi = flow.radius(times)
    err = np.abs(r_star - phi)
    sup = float(np.max(err)) if np.all(np.isfinite(err)) else math.inf
    return state, TrackingReport(times, r_star, phi, sup)


def _level(values, grid):
    r = extract_zero_level(values, grid)
    return math.nan if r is None else r
