from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from twolevel.model import (
    AffineLaw,
    CouplingModel,
    Kind,
    Matrix2,
    OpenParams,
    ParamTrajectory,
    PtParams,
    PtVariant,
    build_matrix,
    params_at,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def test_right_preset_at_zero(right):
    p = params_at(right, 0.0)
    assert isinstance(p, OpenParams)
    assert (p.e1, p.e2, p.gamma1 / 2, p.gamma2 / 2, p.omega) == (1.0, 0.0, 0.5, 0.5, 0.05j)


def test_right_preset_at_one(right):
    p = params_at(right, 1.0)
    assert (p.e1, p.e2) == (0.5, 1.0)


def test_left_preset_at_zero(left):
    p = params_at(left, 0.0)
    assert isinstance(p, PtParams)
    assert (p.e, p.gamma, p.w, p.variant) == (0.5, 0.0, 0.05, PtVariant.BALANCED)


def test_left_preset_at_ep(left):
    p = params_at(left, 2.0)
    assert p.gamma == pytest.approx(2 * abs(p.w), abs=1e-15)


def test_gaussian_falloff_unit_factor():
    traj = ParamTrajectory(Kind.OPEN, e1=AffineLaw(0.3, 0.0), e2=AffineLaw(0.3, 0.0),
                           coupling=0.05, coupling_model=CouplingModel.GAUSSIAN)
    assert traj.coupling_at(0.0) == 0.05


def test_gaussian_falloff_decays():
    traj = ParamTrajectory(Kind.OPEN, e1=AffineLaw(0.0, 1.0), coupling=0.05,
                           coupling_model=CouplingModel.GAUSSIAN)
    assert traj.coupling_at(2.0) == pytest.approx(0.05 * math.exp(-4.0), rel=1e-15)


def test_zero_open_params_give_zero_matrix():
    m = build_matrix(OpenParams(0, 0, 0, 0, 0))
    assert np.array_equal(m.as_array(), np.zeros((2, 2)))


def test_open_matrix_placement():
    m = build_matrix(OpenParams(1, 0, 1, 1, 0.05j))
    assert m.h11 == 1 + 0.5j and m.h22 == 0.5j
    assert m.h12 == m.h21 == 0.05j
    assert m.is_symmetric


def test_pt_balanced_placement():
    m = build_matrix(PtParams(0.5, 0.1, 0.05, PtVariant.BALANCED))
    expected = np.array([[0.5 - 0.05j, 0.05], [0.05, 0.5 + 0.05j]])
    assert np.array_equal(m.as_array(), expected)
    assert m.is_pt_form


def test_pt_lossy_placement():
    m = build_matrix(PtParams(0.5, 0.1, 0.05j, PtVariant.LOSSY))
    assert m.h11 == 0.5 - 0.05j and m.h22 == 0.5
    assert m.h12 == 0.05j and m.h21 == -0.05j


def test_matrix_rejects_non_finite():
    with pytest.raises(ValueError):
        Matrix2(1, 0, 0, complex(math.nan, 0))


def test_scale_floor_is_one():
    assert Matrix2(0.1, 0, 0, 0.2).scale == 1.0
    assert Matrix2(3j, 0, 0, 0).scale == 3.0


def test_round_trip_array():
    m = Matrix2(1 + 2j, 3, 4j, -1)
    assert Matrix2.from_array(m.as_array()) == m


@given(finite, finite, finite, finite, finite, finite)
def test_open_matrix_always_symmetric(e1, e2, g1, g2, wr, wi):
    assert build_matrix(OpenParams(e1, e2, g1, g2, complex(wr, wi))).is_symmetric


@given(finite, finite, finite, finite, st.sampled_from(list(PtVariant)))
def test_pt_matrix_always_pt_form(e, g, wr, wi, variant):
    assert build_matrix(PtParams(e, g, complex(wr, wi), variant)).is_pt_form


@given(finite, finite, finite)
def test_affine_law_exact(c, s, a):
    assert AffineLaw(c, s)(a) == c + s * a
