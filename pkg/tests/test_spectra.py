import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from indicyl import spectra
from indicyl.spectra import (
    GroupAction,
    OperatorKind,
    SpectrumError,
    lens_averaging_projector,
    lens_scalar_multiplicity,
    load_hyperbolic_spectrum,
    sphere_coclosed_oneform_eigenvalue,
    sphere_scalar_eigenvalue,
    sphere_tt_eigenvalue,
    torus_spectrum,
)

CUBIC = (2 * math.pi,) * 3


# ---------------------------------------------------------------------------
# Round sphere closed forms
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("j,expected", [(0, 0.0), (2, 8.0), (3, 15.0)])
def test_sphere_scalar_eigenvalue(j, expected):
    assert sphere_scalar_eigenvalue(j) == expected


@pytest.mark.parametrize("j,expected", [(1, 4.0), (2, 9.0), (5, 36.0)])
def test_sphere_oneform_eigenvalue(j, expected):
    assert sphere_coclosed_oneform_eigenvalue(j) == expected


def test_sphere_oneform_rejects_zero():
    with pytest.raises(ValueError):
        sphere_coclosed_oneform_eigenvalue(0)


@pytest.mark.parametrize("j,expected", [(2, 6.0), (3, 13.0), (4, 22.0)])
def test_sphere_tt_eigenvalue(j, expected):
    assert sphere_tt_eigenvalue(j) == expected


def test_sphere_tt_rejects_below_bound():
    with pytest.raises(ValueError):
        sphere_tt_eigenvalue(1)


@given(st.integers(min_value=2, max_value=200))
def test_tt_eigenvalue_plus_three_is_square(j):
    lam = sphere_tt_eigenvalue(j)
    assert lam + 3 == (j + 1) ** 2


# ---------------------------------------------------------------------------
# Torus spectrum against brute-force enumeration
# ---------------------------------------------------------------------------


def brute_force_counts(cutoff):
    """Independent lattice-vector count for the cubic lattice of side 2 pi."""
    counts = {}
    kmax = int(math.isqrt(int(cutoff))) + 1
    for k1 in range(-kmax, kmax + 1):
        for k2 in range(-kmax, kmax + 1):
            for k3 in range(-kmax, kmax + 1):
                q = k1 * k1 + k2 * k2 + k3 * k3
                if q <= cutoff:
                    counts[q] = counts.get(q, 0) + 1
    return counts


def test_torus_scalar_cubic_example():
    entries = torus_spectrum(CUBIC, OperatorKind.SCALAR_HODGE, 4.5)
    got = {round(e.eigenvalue): e.multiplicity for e in entries}
    assert got == {0: 1, 1: 6, 2: 12, 3: 8, 4: 6}


def test_torus_parallel_modes():
    for kind, dim in [
        (OperatorKind.DIVFREE_TT_ROUGH, 5),
        (OperatorKind.COCLOSED_ONEFORM_HODGE, 3),
        (OperatorKind.SCALAR_HODGE, 1),
    ]:
        entries = torus_spectrum((3.0, 4.0, 5.5), kind, 0.5)
        assert entries[0].eigenvalue == 0.0
        assert entries[0].multiplicity == dim


@settings(max_examples=20, deadline=None)
@given(st.floats(min_value=0.5, max_value=30.0))
def test_torus_cubic_matches_brute_force(cutoff):
    counts = brute_force_counts(cutoff)
    for kind, zero_dim, per_vec in [
        (OperatorKind.SCALAR_HODGE, 1, 1),
        (OperatorKind.COCLOSED_ONEFORM_HODGE, 3, 2),
        (OperatorKind.DIVFREE_TT_ROUGH, 5, 2),
    ]:
        entries = torus_spectrum(CUBIC, kind, cutoff)
        assert len(entries) == len(counts)
        for e in entries:
            q = round(e.eigenvalue)
            expected = zero_dim if q == 0 else per_vec * counts[q]
            assert e.multiplicity == expected


def test_torus_anisotropic_eigenvalues():
    entries = torus_spectrum((2 * math.pi, math.pi, 2 * math.pi), OperatorKind.SCALAR_HODGE, 4.5)
    got = {round(e.eigenvalue): e.multiplicity for e in entries}
    # Eigenvalues k1^2 + 4 k2^2 + k3^2: the short direction contributes 4 k^2.
    assert got == {0: 1, 1: 4, 2: 4, 4: 6}


# ---------------------------------------------------------------------------
# Lens space multiplicities
# ---------------------------------------------------------------------------


def weight_count_multiplicity(g: GroupAction, j: int) -> int:
    """Independent integer oracle: dimension of the invariants of the degree-j
    harmonic polynomials via diagonal weights in complex coordinates.

    The rotation acts diagonally on monomials z1^a conj(z1)^b z2^c conj(z2)^d
    with character exp(2 pi i (q1 (a-b) + q2 (c-d)) m / p); the harmonic space
    is the degree-j polynomials minus |z|^2 times the degree-(j-2) ones.
    """

    def invariant_monomials(deg):
        if deg < 0:
            return 0
        total = 0
        for a in range(deg + 1):
            for b in range(deg + 1 - a):
                for c in range(deg + 1 - a - b):
                    d = deg - a - b - c
                    w = g.q1 * (a - b) + g.q2 * (c - d)
                    if w % g.p == 0:
                        total += 1
        return total

    return invariant_monomials(j) - invariant_monomials(j - 2)


def test_trivial_group_multiplicity():
    g = GroupAction(1, 1, 1)
    for j in range(11):
        assert lens_scalar_multiplicity(g, j) == (j + 1) ** 2


def test_rp3_examples():
    g = GroupAction(2, 1, 1)
    assert lens_scalar_multiplicity(g, 1) == 0
    assert lens_scalar_multiplicity(g, 2) == 9


def test_rp3_degree2_explicit_basis():
    # All 9 degree-2 harmonics are even, hence invariant under the antipodal
    # map: x_i x_j (6) minus the trace direction leaves xy, xz, xw, yz, yw,
    # zw, x^2-y^2, y^2-z^2, z^2-w^2.
    g = GroupAction(2, 1, 1)
    basis = spectra._harmonic_basis(2)
    assert basis.shape[0] == 9
    proj = lens_averaging_projector(g, 2)
    assert np.allclose(proj, np.eye(9), atol=1e-9)


@pytest.mark.parametrize(
    "p,q1,q2",
    [(2, 1, 1), (3, 1, 1), (3, 1, 2), (4, 1, 3), (5, 1, 2), (5, 2, 3), (7, 1, 3)],
)
def test_lens_multiplicity_matches_weight_count(p, q1, q2):
    g = GroupAction(p, q1, q2)
    for j in range(8):
        assert lens_scalar_multiplicity(g, j) == weight_count_multiplicity(g, j)


@pytest.mark.parametrize("p,q1,q2,j", [(2, 1, 1, 3), (3, 1, 2, 4), (5, 1, 2, 5)])
def test_lens_projector_idempotent(p, q1, q2, j):
    proj = lens_averaging_projector(GroupAction(p, q1, q2), j)
    assert np.allclose(proj @ proj, proj, atol=1e-9)


def test_lens_double_averaging_changes_nothing():
    # Idempotency in multiplicity form: applying the averaging projector
    # twice gives the same trace, so no multiplicity changes.
    g = GroupAction(5, 1, 2)
    for j in range(1, 6):
        proj = lens_averaging_projector(g, j)
        once = round(float(np.trace(proj)))
        twice = round(float(np.trace(proj @ proj)))
        assert once == twice == lens_scalar_multiplicity(g, j)


def test_group_action_requires_coprime():
    with pytest.raises(ValueError):
        GroupAction(4, 2, 1)


def test_harmonic_projection_is_harmonic_and_idempotent():
    j = 5
    p = {(2, 1, 1, 1): Fraction(3), (0, 5, 0, 0): Fraction(-2)}
    h = spectra._harmonic_projection(p, j)
    assert spectra._laplace4(h) == {}
    assert spectra._harmonic_projection(h, j) == h


# ---------------------------------------------------------------------------
# Hyperbolic spectrum files
# ---------------------------------------------------------------------------


GOOD_FILE = """\
# synthetic spectrum
b1 0
codazzi 2
scalar 1 2.1 3
oneform 1 1.3 4
tt 1 3.0 2
tt 2 5.2 8
"""


def test_load_good_file(tmp_path):
    path = tmp_path / "spec.txt"
    path.write_text(GOOD_FILE)
    hs = load_hyperbolic_spectrum(path)
    assert hs.b1 == 0
    assert hs.dim_codazzi == 2
    assert len(hs.entries) == 4


def test_tt_bound_violation_rejected(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("b1 0\ncodazzi 0\ntt 1 2.9 1\n")
    with pytest.raises(SpectrumError, match="lower bound 3"):
        load_hyperbolic_spectrum(path)


def test_codazzi_consistency(tmp_path):
    path = tmp_path / "ok.txt"
    path.write_text("b1 0\ncodazzi 2\ntt 1 3.0 2\n")
    hs = load_hyperbolic_spectrum(path)
    assert hs.dim_codazzi == 2

    bad = tmp_path / "bad.txt"
    bad.write_text("b1 0\ncodazzi 1\ntt 1 3.0 2\n")
    with pytest.raises(SpectrumError, match="codazzi"):
        load_hyperbolic_spectrum(bad)


def test_rational_homology_sphere_without_codazzi(tmp_path):
    path = tmp_path / "rhs.txt"
    path.write_text("b1 0\ncodazzi 0\nscalar 1 2.5 4\ntt 1 4.1 6\n")
    hs = load_hyperbolic_spectrum(path)
    assert hs.dim_codazzi == 0


def test_harmonic_oneform_b1_mismatch(tmp_path):
    path = tmp_path / "mix.txt"
    path.write_text("b1 2\ncodazzi 0\noneform 0 0.0 1\n")
    with pytest.raises(SpectrumError, match="b1"):
        load_hyperbolic_spectrum(path)


def test_decreasing_eigenvalues_rejected(tmp_path):
    path = tmp_path / "dec.txt"
    path.write_text("b1 0\ncodazzi 0\nscalar 1 5.0 1\nscalar 2 4.0 1\n")
    with pytest.raises(SpectrumError, match="increasing"):
        load_hyperbolic_spectrum(path)


def test_cross_section_spec_validation():
    with pytest.raises(ValueError):
        spectra.CrossSectionSpec(0, spectra.Sphere())
    with pytest.raises(ValueError):
        spectra.Torus((1.0, -2.0, 3.0))
