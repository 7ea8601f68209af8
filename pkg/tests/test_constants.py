import numpy as np
import pytest

from fracac.constants import (StructuralConstants, c_alpha_with_error,
                              compute_C_alpha, compute_c_alpha, structural_constants)
from fracac.errors import DomainError
from fracac.profile import GAMMA_PRIME_0
from oracles import brute_force_c_alpha


def test_alpha_zero_limit():
    assert 0.9 < compute_c_alpha(0.01, 1e-8) < 1.2


def test_matches_brute_force_at_half():
    assert abs(compute_c_alpha(0.5, 1e-10) - brute_force_c_alpha(0.5)) < 1e-8


def test_two_singularity_treatments_agree():
    a, _ = c_alpha_with_error(0.3, 1e-10, method="jacobi")
    b, _ = c_alpha_with_error(0.3, 1e-10, method="substitution")
    assert abs(a - b) < 1e-8


def test_halving_tol_within_error_estimate():
    for alpha in (0.2, 0.6, 0.9):
        v1, e1 = c_alpha_with_error(alpha, 1e-6)
        v2, _ = c_alpha_with_error(alpha, 5e-7)
        assert abs(v1 - v2) <= max(e1, 1e-15)


def test_tail_truncation_insensitive():
    for alpha in (0.1, 0.5, 0.9):
        a, _ = c_alpha_with_error(alpha, 1e-12, cutoff=40.0)
        b, _ = c_alpha_with_error(alpha, 1e-12, cutoff=60.0)
        assert abs(a - b) < 1e-12


def test_c_alpha_positive_and_increasing_in_alpha():
    vals = [compute_c_alpha(a) for a in np.linspace(0.05, 0.95, 19)]
    assert all(v > 0 for v in vals)
    assert np.all(np.diff(vals) > 0)


def test_C_alpha_formula():
    assert compute_C_alpha(0.5, 1, 1.7) == 0.0
    c = compute_c_alpha(0.5)
    assert compute_C_alpha(0.5, 3, c) == pytest.approx((2 * GAMMA_PRIME_0 / c) ** 2, rel=1e-15)


def test_C_alpha_increasing_in_n():
    for alpha in (0.3, 0.7):
        vals = [structural_constants(alpha, n).C_alpha for n in range(1, 6)]
        assert np.all(np.diff(vals) > 0)


def test_C_alpha_continuous_in_alpha():
    def max_jump(k):
        alphas = np.linspace(0.05, 0.95, k)
        vals = np.array([structural_constants(a, 2).C_alpha for a in alphas])
        assert np.all(np.isfinite(vals)) and np.all(vals > 0)
        return np.abs(np.diff(np.log(vals))).max()

    # jumps shrink in proportion to the grid spacing
    coarse, fine = max_jump(91), max_jump(181)
    assert 1.8 < coarse / fine < 2.2


def test_structural_constants_record():
    sc = StructuralConstants.compute(0.4, 3)
    assert sc.C_alpha == compute_C_alpha(0.4, 3, sc.c_alpha)
    assert 0 <= sc.quadrature_error_estimate < 1e-10
    assert structural_constants(0.4, 1).C_alpha == 0.0


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.2, 1.5])
def test_rejects_bad_alpha(alpha):
    with pytest.raises(DomainError):
        compute_c_alpha(alpha)
