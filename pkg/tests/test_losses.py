import numpy as np
import pytest

from iretarget.errors import ValidationError
from iretarget.losses import (
    distance_matrices,
    loss_con,
    loss_con_value_and_grad,
    loss_hum,
    loss_hum_grad,
    loss_kin,
    loss_kin_grad,
    loss_pose,
    loss_pose_grad,
    loss_temp,
    loss_temp_grad,
    pairwise_distance_matrix,
)

import oracles
from oracles import fd_gradient


# ---- kinematic similarity -------------------------------------------------

def test_kin_identical_is_zero(rng):
    x = rng.normal(size=(3, 4, 3))
    assert loss_kin(x, x) == 0.0


def test_kin_single_offset():
    robot = np.zeros((2, 2, 3))
    target = np.zeros((2, 2, 3))
    robot[0, 1, 0] = 0.1
    assert loss_kin(robot, target) == pytest.approx(0.01 / 4)


def test_kin_matches_oracle(rng):
    robot = rng.normal(size=(4, 5, 3))
    target = rng.normal(size=(4, 5, 3))
    assert loss_kin(robot, target) == pytest.approx(oracles.kin_oracle(robot, target), rel=1e-12)


def test_kin_shape_mismatch():
    with pytest.raises(ValidationError):
        loss_kin(np.zeros((2, 3, 3)), np.zeros((2, 4, 3)))


# ---- pairwise distances ---------------------------------------------------

def test_pairwise_two_points():
    out = pairwise_distance_matrix(np.array([[0.0, 0, 0], [1.0, 0, 0]]))
    np.testing.assert_allclose(out, [[0, 1], [1, 0]], atol=1e-15)


def test_pairwise_collinear():
    out = pairwise_distance_matrix(np.array([[0.0, 0, 0], [1.0, 0, 0], [3.0, 0, 0]]))
    np.testing.assert_allclose(out, [[0, 1, 3], [1, 0, 2], [3, 2, 0]], atol=1e-15)


def test_pairwise_matches_oracle(rng):
    points = rng.normal(size=(6, 3))
    np.testing.assert_allclose(pairwise_distance_matrix(points), oracles.pairwise_oracle(points), atol=1e-12)
    out = pairwise_distance_matrix(points)
    np.testing.assert_allclose(out, out.T, atol=0)
    np.testing.assert_allclose(np.diag(out), 0.0, atol=0)


# ---- contact consistency ---------------------------------------------------

def test_con_identical_zero(rng):
    d = distance_matrices(rng.normal(size=(3, 5, 3)))
    assert loss_con(d, d) == 0.0


def test_con_single_symmetric_entry():
    orig = np.zeros((1, 3, 3))
    opt = np.zeros((1, 3, 3))
    opt[0, 0, 1] = opt[0, 1, 0] = 0.3
    assert loss_con(opt, orig) == pytest.approx(2 * 0.3**2)


def test_con_matches_oracle(rng):
    a = distance_matrices(rng.normal(size=(4, 5, 3)))
    b = distance_matrices(rng.normal(size=(4, 5, 3)))
    assert loss_con(a, b) == pytest.approx(oracles.con_oracle(a, b), rel=1e-12)


def test_con_grad_matches_fd(rng):
    points = rng.normal(size=(3, 5, 3))
    orig = distance_matrices(rng.normal(size=(3, 5, 3)))
    value, grad = loss_con_value_and_grad(points, orig)
    assert value == pytest.approx(loss_con(distance_matrices(points), orig), rel=1e-12)

    def f(flat):
        return loss_con(distance_matrices(flat.reshape(3, 5, 3)), orig)

    numeric = fd_gradient(f, points.ravel().copy())
    np.testing.assert_allclose(grad.ravel(), numeric, rtol=1e-6, atol=1e-9)


# ---- partner fidelity -------------------------------------------------------

def test_hum_identical_zero(rng):
    x = rng.normal(size=(4, 6, 3))
    assert loss_hum(x, x) == 0.0


def test_hum_single_joint_moved():
    orig = np.zeros((2, 6, 3))
    adj = orig.copy()
    adj[1, 2, 1] = 0.2
    assert loss_hum(adj, orig) == pytest.approx(0.04 / 2)


def test_hum_matches_oracle_and_fd(rng):
    adj = rng.normal(size=(3, 4, 3))
    orig = rng.normal(size=(3, 4, 3))
    assert loss_hum(adj, orig) == pytest.approx(oracles.hum_oracle(adj, orig), rel=1e-12)
    numeric = fd_gradient(lambda x: loss_hum(x.reshape(3, 4, 3), orig), adj.ravel().copy())
    np.testing.assert_allclose(loss_hum_grad(adj, orig).ravel(), numeric, rtol=1e-6, atol=1e-9)


# ---- temporal coherence ------------------------------------------------------

def test_temp_constant_zero():
    assert loss_temp(np.ones((6, 3))) == 0.0


def test_temp_linear_ramp_velocity_only():
    s = 0.07
    q = (s * np.arange(10))[:, None]
    assert loss_temp(q) == pytest.approx(s**2, rel=1e-12)


def test_temp_matches_oracle_and_fd(rng):
    q = rng.normal(size=(7, 4))
    w = 1.3
    assert loss_temp(q, w) == pytest.approx(oracles.temp_oracle(q, w), rel=1e-12)
    numeric = fd_gradient(lambda x: loss_temp(x.reshape(7, 4), w), q.ravel().copy())
    np.testing.assert_allclose(loss_temp_grad(q, w).ravel(), numeric, rtol=1e-6, atol=1e-9)


def test_temp_rejects_short():
    with pytest.raises(ValidationError):
        loss_temp(np.zeros((2, 3)))


# ---- pose magnitude -----------------------------------------------------------

def test_pose_zeros():
    assert loss_pose(np.zeros((4, 3))) == 0.0


def test_pose_constant_half():
    assert loss_pose(np.full((5, 4), 0.5)) == pytest.approx(0.25)


def test_pose_matches_oracle_and_closed_form_grad(rng):
    q = rng.normal(size=(5, 6))
    assert loss_pose(q) == pytest.approx(oracles.pose_oracle(q), rel=1e-12)
    np.testing.assert_allclose(loss_pose_grad(q), 2 * q / q.size, atol=1e-15)
