import warnings

import numpy as np
import pytest

from fracac.caputo import l1_apply
from fracac.constants import structural_constants
from fracac.errors import BlowUp, DomainError, UnderResolved
from fracac.params import ModelParams
from fracac.solver import (RadialGrid, apply_laplacian, default_dt, extract_zero_level,
                           initialize, solve, step)
from fracac.sphere_flow import extinction_time


def _T(alpha, n):
    return extinction_time(alpha, structural_constants(alpha, n).C_alpha)


def test_grid():
    g = RadialGrid(2.0, 200)
    assert g.nodes[0] == 0.0 and g.nodes[-1] == 2.0 and g.dr == 0.01
    with pytest.raises(DomainError):
        RadialGrid(2.0, 8)


def test_initialize():
    p = ModelParams(0.5, 2, 0.05)
    g = RadialGrid(2.0, 200)
    st = initialize(p, g, default_dt(0.05, 0.5))
    u = st.current
    assert u[100] == 0.0  # r = 1
    # 1 - tanh(20/sqrt 2) = 1.0407e-12 (arbitrary precision)
    assert abs(u[-1] - 1.0) < 1.05e-12
    assert u[99] < 0 < u[101]
    assert st.history.steps == 0
    with pytest.raises(UnderResolved):
        initialize(ModelParams(0.5, 2, 0.02), g, 1e-4)
    with pytest.raises(DomainError):
        initialize(p, g, 1.0)  # violates the dt rule


def test_discrete_laplacian_exact_on_quadratics():
    # Lap(r^2) = 2n in n dimensions, also at the symmetric origin node
    g = RadialGrid(2.0, 64)
    for n in (1, 2, 3):
        lap = apply_laplacian(g.nodes**2, g, n)
        assert np.allclose(lap[:-1], 2 * n, atol=1e-9)


@pytest.mark.parametrize("value", [1.0, -1.0])
def test_equilibria_fixed(value):
    p = ModelParams(0.5, 2, 0.05)
    st = initialize(p, RadialGrid(2.0, 200), default_dt(0.05, 0.5))
    st.values[0] = value
    for _ in range(25):
        step(st)
    assert np.max(np.abs(st.current - value)) < 1e-13


def test_zero_is_fixed():
    p = ModelParams(0.5, 2, 0.05)
    st = initialize(p, RadialGrid(2.0, 200), default_dt(0.05, 0.5))
    st.values[0] = 0.0
    for _ in range(10):
        step(st)
    assert np.all(st.current == 0.0)


def test_interface_moves_inward():
    T = _T(0.5, 2)
    _, rep = solve(ModelParams(0.5, 2, 0.05), RadialGrid.from_spacing(0.01), 0.05**1.5 / 2, 0.1 * T)
    assert rep.r_star[-1] < 1.0
    assert rep.sup_error <= 5 * 0.05


def test_odd_symmetry():
    p = ModelParams(0.5, 2, 0.05)
    g = RadialGrid.from_spacing(0.01)
    dt = default_dt(0.05, 0.5) / 2
    a = initialize(p, g, dt)
    b = initialize(p, g, dt)
    b.values[0] *= -1
    for _ in range(30):
        step(a)
        step(b)
    assert np.max(np.abs(a.current + b.current)) < 1e-12


def test_stored_history_reproduces_caputo_value():
    p = ModelParams(0.3, 3, 0.05)
    st = initialize(p, RadialGrid.from_spacing(0.01), default_dt(0.05, 0.3) / 2)
    for _ in range(40):
        step(st)
        for node in (0, 37, 100, 150):
            hist = st.history
            hist.values = hist.values[:, node]
            assert abs(l1_apply(hist) - st.last_caputo[node]) <= 1e-12 * (1 + abs(st.last_caputo[node]))


def test_flat_interface_static():
    eps = 0.05
    g = RadialGrid.from_spacing(eps / 5)
    _, rep = solve(ModelParams(0.5, 1, eps), g, eps**1.5 / 2, 0.2)
    assert np.max(np.abs(rep.r_star - 1.0)) <= 2 * g.dr
    assert np.all(rep.phi0 == 1.0)


def test_tracking_improves_under_refinement():
    T = _T(0.5, 2)
    errs = []
    for eps in (0.1, 0.05, 0.025):
        _, rep = solve(ModelParams(0.5, 2, eps), RadialGrid.from_spacing(eps / 5),
                       eps**1.5 / 2, 0.2 * T)
        errs.append(rep.sup_error)
    assert errs[0] > errs[1] > errs[2]


def test_explicit_reaction_unstable_at_rule_step():
    eps = 0.05
    T = _T(0.5, 2)
    with pytest.raises(BlowUp):
        solve(ModelParams(0.5, 2, eps), RadialGrid.from_spacing(eps / 5), eps**1.5 / 2,
              0.2 * T, reaction="explicit")


def test_explicit_reaction_agrees_with_small_steps():
    eps = 0.1
    T = _T(0.5, 2)
    g = RadialGrid.from_spacing(eps / 5)
    _, lin = solve(ModelParams(0.5, 2, eps), g, eps**1.5 / 2, 0.1 * T)
    _, exp_ = solve(ModelParams(0.5, 2, eps), g, eps**1.5 / 50, 0.1 * T, reaction="explicit")
    assert abs(lin.r_star[-1] - exp_.r_star[-1]) < 2e-3


def test_solve_rejects_late_end():
    with pytest.raises(DomainError):
        solve(ModelParams(0.5, 2, 0.1), RadialGrid.from_spacing(0.02), 0.01, 0.6 * _T(0.5, 2))


def test_extract_zero_level():
    g = RadialGrid(2.0, 200)
    u = np.tanh((g.nodes - 1.0) / (0.05 * np.sqrt(2)))
    assert abs(extract_zero_level(u, g) - 1.0) < 1e-3
    assert extract_zero_level(np.ones(10), np.linspace(0, 1, 10)) is None
    r = np.array([0.0, 0.5, 1.0, 1.5])
    assert extract_zero_level(np.array([-1, -0.2, 0.2, 1.0]), r) == pytest.approx(0.75)
    with pytest.warns(RuntimeWarning):
        out = extract_zero_level(np.array([1.0, -1.0, -1.0, 1.0]), r)
    assert out == pytest.approx(1.25)
