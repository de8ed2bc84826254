import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from indicyl import indicial, oracle
from indicyl.oracle import (
    OdeSystem,
    companion_roots,
    compare_root_sets,
    clustered_multiset,
    flat_mode_pencil,
    matrix_a,
    matrixA_system,
    ode_mixed_b,
    ode_tt_branch,
    pencil_roots,
    polynomial_eigenvalues,
)


def as_sorted(vals):
    return sorted((complex(v) for v in vals), key=lambda z: (z.real, z.imag))


# ---------------------------------------------------------------------------
# Companion roots
# ---------------------------------------------------------------------------


def test_companion_simple_quadratic():
    # f'' - 9 f = 0
    ode = OdeSystem((np.array([[-9.0]]), np.array([[0.0]]), np.array([[1.0]])))
    got = as_sorted(companion_roots(ode))
    assert abs(got[0] + 3) < 1e-12 and abs(got[1] - 3) < 1e-12


def test_companion_tt_branch_example():
    # -(1/2) f'' + 3 f' - 4 f = 0 has roots 2 and 4 by the quadratic formula.
    got = as_sorted(companion_roots(ode_tt_branch(6.0, 1, +1)))
    assert abs(got[0] - 2) < 1e-12 and abs(got[1] - 4) < 1e-12


def test_companion_rejects_singular_leading():
    ode = OdeSystem((np.eye(2), np.eye(2), np.diag([1.0, 0.0])))
    with pytest.raises(ValueError, match="singular"):
        companion_roots(ode)
    # The generalized path still returns the finite spectrum.
    vals = polynomial_eigenvalues(ode)
    assert len(vals) == 3


def test_mixed_b_companion():
    got = as_sorted(companion_roots(ode_mixed_b(9.0, 1)))
    r5 = math.sqrt(5)
    assert abs(got[0] + r5) < 1e-12 and abs(got[1] - r5) < 1e-12


# ---------------------------------------------------------------------------
# The explicit 4x4 mixed system
# ---------------------------------------------------------------------------


def test_matrix_a_shape_and_entries():
    A = matrix_a(8.0, 1)
    assert A.shape == (4, 4)
    assert A[1, 0] == pytest.approx(16.0 / 3.0)
    assert A[1, 3] == pytest.approx(8.0 / 3.0)
    assert A[3, 1] == -0.5
    assert A[3, 2] == pytest.approx(1.5 * 8 - 4)


def test_matrix_a_eigenvalues_mu0():
    vals = as_sorted(np.linalg.eigvals(matrix_a(0.0, 1)))
    expected = as_sorted([0, 0, 2j, -2j])
    for v, e in zip(vals, expected):
        assert abs(v - e) < 1e-9


def test_matrix_a_eigenvalues_mu3():
    vals = clustered_multiset(np.linalg.eigvals(matrix_a(3.0, 1)))
    expected = [-1, -1, 1, 1]
    cmp = compare_root_sets(expected, vals, 1e-9)
    assert cmp.matched


def test_matrix_a_vs_closed_form_mu8():
    vals = clustered_multiset(companion_roots(matrixA_system(8.0, 1)))
    ap, am = indicial.alpha_pm(8.0, 1)
    cmp = compare_root_sets([ap, -ap, am, -am], vals, 1e-9)
    assert cmp.matched and cmp.max_mismatch < 1e-9


@pytest.mark.parametrize("kappa", [-1, 0, 1])
def test_matrix_a_grid_vs_closed_form(kappa):
    worst = 0.0
    for mu in range(0, 49):
        ap, am = indicial.alpha_pm(float(mu), kappa)
        expected = clustered_multiset([ap, -ap, am, -am])
        actual = clustered_multiset(np.linalg.eigvals(matrix_a(float(mu), kappa)))
        cmp = compare_root_sets(expected, actual, 1e-9)
        assert cmp.matched, (mu, kappa, expected, actual)
        worst = max(worst, cmp.max_mismatch)
    assert worst < 1e-9


# ---------------------------------------------------------------------------
# Flat mode pencil
# ---------------------------------------------------------------------------


def test_pencil_zero_mode_dimension():
    clusters = pencil_roots(flat_mode_pencil((0, 0, 0)))
    assert len(clusters) == 1
    c = clusters[0]
    assert abs(c.value) < 1e-9
    assert c.algebraic == 14
    assert c.jordan


def test_pencil_first_modes_match_closed_forms():
    for k, ev in [((1, 0, 0), 1.0), ((1, 1, 0), 2.0), ((1, 1, 1), 3.0)]:
        clusters = pencil_roots(flat_mode_pencil(k))
        actual = [c.value for c in clusters]
        r = math.sqrt(ev)
        cmp = compare_root_sets([r, -r], actual, 1e-8)
        assert cmp.matched, (k, actual)
        assert all(c.jordan for c in clusters)


def test_pencil_anisotropic_lattice():
    lengths = (2 * math.pi, math.pi, 2 * math.pi)
    clusters = pencil_roots(flat_mode_pencil((0, 1, 0), lengths))
    r = 2.0  # (2 pi / pi)^2 = 4
    cmp = compare_root_sets([r, -r], [c.value for c in clusters], 1e-8)
    assert cmp.matched


# ---------------------------------------------------------------------------
# Root-set comparison
# ---------------------------------------------------------------------------


def test_compare_matched_within_tolerance():
    cmp = compare_root_sets([2, 4], [2 + 1e-12, 4 - 1e-12], 1e-9)
    assert cmp.matched and cmp.max_mismatch < 1e-9


def test_compare_detects_spurious():
    cmp = compare_root_sets([2], [2, 3], 1e-9)
    assert not cmp.matched


def test_compare_ignores_roots_beyond_truncation():
    cmp = compare_root_sets([2], [2, 50], 1e-9, truncation_bound=10.0)
    assert cmp.matched


def test_compare_mixed_b_against_companion():
    r5 = math.sqrt(5)
    cmp = compare_root_sets(
        [r5, -r5], companion_roots(ode_mixed_b(9.0, 1)), 1e-9
    )
    assert cmp.matched


def test_compare_duplicates_require_multiplicity():
    cmp = compare_root_sets([1, 1], [1], 1e-9)
    assert not cmp.matched


@settings(max_examples=30, deadline=None)
@given(
    st.lists(
        st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
        min_size=1,
        max_size=6,
    ),
    st.floats(min_value=0, max_value=5e-10),
)
def test_compare_accepts_small_perturbations(roots, delta):
    perturbed = [z + delta for z in roots]
    cmp = compare_root_sets(roots, perturbed, 1e-9)
    assert cmp.matched


def test_ode_system_validation():
    with pytest.raises(ValueError):
        OdeSystem((np.eye(2),))
    with pytest.raises(ValueError):
        OdeSystem((np.eye(2), np.eye(3)))
