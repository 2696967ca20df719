import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from smc_arm_lab import arm
from smc_arm_lab.state_space import affine_terms, affine_terms_joint, decoupling_matrix, from_state, to_state

finite = st.floats(-3.0, 3.0, allow_nan=False)
vec = st.tuples(finite, finite, finite).map(np.array)


@given(vec, vec)
def test_state_round_trip(theta, qd):
    x = to_state(theta, qd)
    assert x[0] == theta[0] and x[1] == qd[0] and x[4] == theta[2]
    back_theta, back_qd = from_state(x)
    np.testing.assert_array_equal(back_theta, theta)
    np.testing.assert_array_equal(back_qd, qd)


def test_state_shape_checked():
    with pytest.raises(ValueError):
        from_state(np.zeros(5))


def test_drift_vanishes_at_rest_without_gravity():
    terms = affine_terms(to_state((0.3, -1.2, 2.0), (0, 0, 0)), arm.ArmParams(g=0.0))
    np.testing.assert_array_equal(terms.f, 0.0)


def test_gains_at_aligned_configuration(default_arm):
    m = arm.mass_matrix((0, 0, 0), default_arm)
    # adjugate / determinant, no library inverse
    cof = np.array([[(-1) ** (i + j) * np.linalg.det(np.delete(np.delete(m, i, 0), j, 1))
                     for j in range(3)] for i in range(3)])
    inv = cof.T / np.linalg.det(m)
    terms = affine_terms(to_state((0, 0, 0), (0, 0, 0)), default_arm)
    np.testing.assert_allclose(terms.g, np.diag(inv), rtol=1e-10)


@given(vec, vec)
def test_drift_is_torque_free_acceleration(theta, qd):
    p = arm.ArmParams()
    terms = affine_terms(to_state(theta, qd), p)
    np.testing.assert_allclose(terms.f, arm.forward_dynamics(theta, qd, np.zeros(3), p), atol=1e-12)


@given(vec, vec, vec)
def test_reconstruction(theta, qd, tau):
    p = arm.ArmParams()
    terms = affine_terms(to_state(theta, qd), p)
    np.testing.assert_allclose(terms.f + terms.m_inv @ tau, arm.forward_dynamics(theta, qd, tau, p), atol=1e-10)


def test_gains_positive_on_grid(default_arm):
    grid = np.linspace(-math.pi, math.pi, 25)
    for t2 in grid:
        for t3 in grid:
            assert np.all(affine_terms_joint((0.0, t2, t3), (0, 0, 0), default_arm).g > 0)


@given(vec, vec, vec)
def test_decoupler_gives_diagonal_response(theta, qd, u):
    p = arm.ArmParams()
    terms = affine_terms_joint(theta, qd, p)
    acc = arm.forward_dynamics(theta, qd, decoupling_matrix(terms) @ u, p)
    np.testing.assert_allclose(acc, terms.f + terms.g * u, atol=1e-9)
