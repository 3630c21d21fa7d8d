from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twolevel.model import Matrix2, OpenParams, PtParams, PtVariant, build_matrix
from twolevel.spectral import (
    coalescence_ratio,
    discriminant_z,
    eigensystem,
    eigenvalues_closed_form,
    eigenvector_angle,
    mixing_coefficients,
    nonlinear_source_strength,
    phase_rigidity,
    principal_sqrt,
)

from conftest import matrix_at

# Frozen with tests/reference_values.py (mpmath, 50 digits).
Z_D02 = 0.086602540378443865
Z_PT_G005 = 0.043301270189221932
R_061 = 0.52678268764263694
B_061 = 1.6135685927792483
R_0599 = 0.1712841246375735
R_0601 = 0.17255433926737397
NL_0 = 0.0050505050505050505
NL_0599 = 1.6790736145574855

small = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def test_z_degenerate_diagonal():
    assert discriminant_z(OpenParams(0.3, 0.3, 1, 1, 0.05j)) == pytest.approx(0.05j, abs=1e-17)


def test_z_exact_ep():
    assert discriminant_z(OpenParams(0.1, 0.0, 1, 1, 0.05j)) == 0


def test_z_level_repulsion():
    z = discriminant_z(OpenParams(0.2, 0.0, 1, 1, 0.05j))
    assert z.imag == 0
    assert z.real == pytest.approx(Z_D02, rel=1e-14)


@given(st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False))
def test_principal_sqrt_branch(z):
    s = principal_sqrt(z)
    assert s.real >= 0
    if s.real == 0:
        assert s.imag >= 0
    assert abs(s * s - z) <= 1e-12 * max(1.0, abs(z))


def test_closed_form_decoupled():
    p = OpenParams(0.7, 0.2, 0.3, 0.1, 0)
    e1, e2 = eigenvalues_closed_form(p)
    assert e1 == pytest.approx(p.eps1, abs=1e-15)
    assert e2 == pytest.approx(p.eps2, abs=1e-15)


def test_closed_form_midpoint_width_split():
    e_plus, e_minus = eigenvalues_closed_form(OpenParams(2 / 3, 2 / 3, 1, 1, 0.05j))
    assert e_plus == pytest.approx(2 / 3 + 0.55j, abs=1e-15)
    assert e_minus == pytest.approx(2 / 3 + 0.45j, abs=1e-15)
    assert abs(e_plus.imag - e_minus.imag) == pytest.approx(0.1, abs=1e-15)


def test_closed_form_pt_balanced():
    e_plus, e_minus = eigenvalues_closed_form(PtParams(0.5, 0.05, 0.05, PtVariant.BALANCED))
    assert e_plus.imag == 0 and e_minus.imag == 0
    assert e_plus.real == pytest.approx(0.5 + Z_PT_G005, rel=1e-15)
    assert e_minus.real == pytest.approx(0.5 - Z_PT_G005, rel=1e-15)


def test_closed_form_pt_lossy_centre():
    e_plus, e_minus = eigenvalues_closed_form(PtParams(0.5, 0.1, 0.05, PtVariant.LOSSY))
    assert 0.5 * (e_plus + e_minus) == pytest.approx(0.5 - 0.025j, abs=1e-16)


@settings(max_examples=200)
@given(small, small, small, small, small, small)
def test_closed_form_matches_eigensystem(e1, e2, g1, g2, wr, wi):
    p = OpenParams(e1, e2, g1, g2, complex(wr, wi))
    sys = eigensystem(build_matrix(p))
    cf = eigenvalues_closed_form(p)
    scale = max(1.0, abs(cf[0]), abs(cf[1]))
    assert abs(sys.eigenvalues[0] - cf[0]) <= 1e-12 * scale
    assert abs(sys.eigenvalues[1] - cf[1]) <= 1e-12 * scale


def test_diagonal_matrix():
    sys = eigensystem(Matrix2(1, 0, 0, 2 + 0.3j))
    assert sys.eigenvalues == (2 + 0.3j, 1) or sys.eigenvalues == (1, 2 + 0.3j)
    basis = {tuple(np.abs(sys.right[:, k]).round(15)) for k in range(2)}
    assert basis == {(1.0, 0.0), (0.0, 1.0)}
    assert sys.norms == pytest.approx((1.0, 1.0), abs=1e-15)
    assert sys.rigidity == pytest.approx((1.0, 1.0), abs=1e-15)
    assert sys.overlaps == (0, 0)
    assert not sys.defective
    assert phase_rigidity(sys, 0) == pytest.approx(1.0)
    assert phase_rigidity(sys, 1) == pytest.approx(1.0)
    assert eigenvector_angle(sys) == pytest.approx(math.pi / 2)
    rho = coalescence_ratio(sys)
    assert cmath.isfinite(rho)


def test_symmetric_right_preset_061(right):
    sys = eigensystem(matrix_at(right, 0.61))
    r1, r2 = sys.rigidity
    assert r1 == pytest.approx(R_061, rel=1e-12)
    assert r2 == pytest.approx(R_061, rel=1e-12)
    assert r1 < 1 and all(a > 1 for a in sys.norms)
    assert abs(sys.overlaps[0]) == pytest.approx(B_061, rel=1e-12)


def test_bilinear_normalisation_and_biorthogonality(right):
    sys = eigensystem(matrix_at(right, 0.3))
    for k in range(2):
        assert sys.left[:, k] @ sys.right[:, k] == pytest.approx(1, abs=1e-14)
        assert sys.norms[k] == pytest.approx(1 / sys.rigidity[k], rel=1e-14)
    assert sys.left[:, 0] @ sys.right[:, 1] == pytest.approx(0, abs=1e-14)


def test_exact_ep_is_defective():
    sys = eigensystem(build_matrix(OpenParams(0.1, 0.0, 1, 1, 0.05j)))
    assert sys.defective
    assert sys.norms == (math.inf, math.inf)
    assert sys.rigidity == (0.0, 0.0)
    assert phase_rigidity(sys, 0) == 0.0
    assert np.isinf(mixing_coefficients(sys).magnitudes).all()
    assert nonlinear_source_strength(sys, 0.05j) == (math.inf, math.inf)
    assert cmath.isinf(coalescence_ratio(sys))
    # single eigendirection, normalised, proportional to (1, -i) up to phase
    v = sys.right[:, 0]
    assert np.linalg.norm(v) == pytest.approx(1)
    assert abs(v[1] / v[0]) == pytest.approx(1, abs=1e-7)


@pytest.mark.parametrize("a, expected", [(0.599, R_0599), (0.601, R_0601)])
def test_rigidity_near_ep_oracle_values(right, a, expected):
    sys = eigensystem(matrix_at(right, a))
    assert sys.rigidity[0] == pytest.approx(expected, rel=1e-9)
    assert sys.rigidity[1] == pytest.approx(expected, rel=1e-9)


def test_rigidity_falls_toward_ep(right):
    rs = [eigensystem(matrix_at(right, 0.6 - d)).rigidity[0] for d in (1e-1, 1e-2, 1e-3, 1e-4, 1e-6)]
    assert all(x > y for x, y in zip(rs, rs[1:]))


def test_mixing_far_from_ep(right):
    mix = mixing_coefficients(eigensystem(matrix_at(right, 0.0)))
    assert mix.magnitudes[0, 0] == pytest.approx(1, abs=0.01)
    assert mix.magnitudes[0, 1] == pytest.approx(0, abs=0.06)


def test_mixing_midpoint_one_to_one(right):
    mix = mixing_coefficients(eigensystem(matrix_at(right, 2 / 3)))
    assert abs(mix.magnitudes[0, 0] - mix.magnitudes[0, 1]) < 1e-6
    assert abs(mix.magnitudes[1, 0] - mix.magnitudes[1, 1]) < 1e-6


def test_mixing_grows_toward_ep(right):
    mags = [mixing_coefficients(eigensystem(matrix_at(right, 0.6 - d))).magnitudes.max()
            for d in (1e-2, 1e-4, 1e-6, 1e-8)]
    assert all(x < y for x, y in zip(mags, mags[1:]))
    # |b| diverges like |a - a_star|**(-1/4)
    assert mags[-1] > 25


def test_nonlinear_zero_coupling(right):
    sys = eigensystem(matrix_at(right, 0.2))
    assert nonlinear_source_strength(sys, 0) == (0.0, 0.0)


@pytest.mark.parametrize("a, expected", [(0.0, NL_0), (0.599, NL_0599)])
def test_nonlinear_oracle_values(right, a, expected):
    s = nonlinear_source_strength(eigensystem(matrix_at(right, a)), 0.05j)
    assert s[0] == pytest.approx(expected, rel=1e-9)
    assert s[1] == pytest.approx(expected, rel=1e-9)


def test_nonlinear_far_vs_near(right):
    far = nonlinear_source_strength(eigensystem(matrix_at(right, 0.0)), 0.05j)
    near = nonlinear_source_strength(eigensystem(matrix_at(right, 0.599)), 0.05j)
    assert max(far) < 1e-2 * min(near)


def test_nonlinear_increasing(right):
    vals = [nonlinear_source_strength(eigensystem(matrix_at(right, a)), 0.05j)[0]
            for a in np.linspace(0.5, 0.599, 200)]
    assert all(x < y for x, y in zip(vals, vals[1:]))


@pytest.mark.parametrize("delta", [1e-4, -1e-4, 1e-6])
def test_coalescence_ratio_near_ep(right, delta):
    rho = coalescence_ratio(eigensystem(matrix_at(right, 0.6 + delta)))
    assert min(abs(rho - 1j), abs(rho + 1j)) < 1e-2


def test_angle_closes_at_ep(right):
    angles = [eigenvector_angle(eigensystem(matrix_at(right, 0.6 + d))) for d in (1e-2, 1e-4, 1e-6)]
    assert all(x > y for x, y in zip(angles, angles[1:]))
    assert angles[-1] < 1e-2


def test_gauge_larger_component_phase(right):
    sys = eigensystem(matrix_at(right, 0.2))
    for k in range(2):
        v = sys.right[:, k]
        big = v[np.argmax(np.abs(v))]
        assert -math.pi / 2 < cmath.phase(big) <= math.pi / 2


def test_non_symmetric_pt_biorthogonal():
    m = build_matrix(PtParams(0.5, 0.3, 0.05 + 0.02j, PtVariant.LOSSY))
    sys = eigensystem(m)
    A = m.as_array()
    for k in range(2):
        lam = sys.eigenvalues[k]
        assert np.abs(A @ sys.right[:, k] - lam * sys.right[:, k]).max() < 1e-14
        assert np.abs(A.T @ sys.left[:, k] - lam * sys.left[:, k]).max() < 1e-14
        assert sys.left[:, k] @ sys.right[:, k] == pytest.approx(1, abs=1e-13)


@settings(max_examples=300)
@given(st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False), min_size=4, max_size=4))
def test_eigensystem_invariants(z):
    m = Matrix2(*z)
    sys = eigensystem(m)
    e1, e2 = sys.eigenvalues
    scale = max(1.0, max(abs(x) for x in z)) ** 2
    assert abs((e1 + e2) - (m.h11 + m.h22)) <= 1e-12 * scale
    assert abs(e1 * e2 - (m.h11 * m.h22 - m.h12 * m.h21)) <= 1e-11 * scale
    if not sys.defective:
        for r in sys.rigidity:
            assert 0.0 <= r <= 1.0
        for k in range(2):
            assert sys.norms[k] >= 1.0 - 1e-12


@given(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_scalar_matrix_not_defective(z):
    sys = eigensystem(Matrix2(z, 0, 0, z))
    assert not sys.defective
    assert sys.rigidity == (1.0, 1.0)
