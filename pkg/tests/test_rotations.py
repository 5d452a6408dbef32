import numpy as np
import pytest

from iretarget.rotations import (
    axis_angle_to_matrix,
    axis_angle_vjp,
    quat_normalize,
    quat_to_matrix,
    quat_vjp,
    revolute_to_matrix,
    revolute_vjp,
)

from oracles import fd_gradient


def random_grad(rng, shape):
    return rng.normal(size=shape)


def test_axis_angle_identity():
    R = axis_angle_to_matrix(np.zeros((1, 3)))
    np.testing.assert_allclose(R[0], np.eye(3), atol=1e-15)


def test_axis_angle_quarter_turn_z():
    R = axis_angle_to_matrix(np.array([[0.0, 0.0, np.pi / 2]]))[0]
    np.testing.assert_allclose(R @ [1, 0, 0], [0, 1, 0], atol=1e-12)


def test_axis_angle_orthonormal(rng):
    r = rng.normal(scale=1.2, size=(20, 3))
    R = axis_angle_to_matrix(r)
    np.testing.assert_allclose(R @ R.transpose(0, 2, 1), np.broadcast_to(np.eye(3), R.shape), atol=1e-12)
    np.testing.assert_allclose(np.linalg.det(R), 1.0, atol=1e-12)


@pytest.mark.parametrize("scale", [1.0, 1e-3, 1e-6, 0.0])
def test_axis_angle_vjp_matches_fd(rng, scale):
    r = rng.normal(size=(4, 3)) * scale
    g = random_grad(rng, (4, 3, 3))

    def f(flat):
        return float(np.sum(axis_angle_to_matrix(flat.reshape(4, 3)) * g))

    analytic = axis_angle_vjp(r, g).ravel()
    numeric = fd_gradient(f, r.ravel().copy())
    np.testing.assert_allclose(analytic, numeric, rtol=1e-6, atol=1e-9)


def test_revolute_matches_axis_angle(rng):
    axis = np.array([0.0, 0.0, 1.0])
    theta = rng.normal(size=6)
    np.testing.assert_allclose(
        revolute_to_matrix(theta, axis),
        axis_angle_to_matrix(np.outer(theta, axis)),
        atol=1e-12,
    )


def test_revolute_vjp_matches_fd(rng):
    axes = rng.normal(size=(3, 3))
    axes /= np.linalg.norm(axes, axis=1, keepdims=True)
    theta = rng.normal(size=(5, 3))
    g = random_grad(rng, (5, 3, 3, 3))

    def f(flat):
        return float(np.sum(revolute_to_matrix(flat.reshape(5, 3), axes) * g))

    analytic = revolute_vjp(theta, axes, g).ravel()
    numeric = fd_gradient(f, theta.ravel().copy())
    np.testing.assert_allclose(analytic, numeric, rtol=1e-6, atol=1e-9)


def test_quat_identity():
    R = quat_to_matrix(np.array([[1.0, 0.0, 0.0, 0.0]]))
    np.testing.assert_allclose(R[0], np.eye(3), atol=1e-15)


def test_quat_matches_axis_angle(rng):
    r = rng.normal(size=(8, 3))
    theta = np.linalg.norm(r, axis=1, keepdims=True)
    q = np.concatenate([np.cos(theta / 2), np.sin(theta / 2) * r / theta], axis=1)
    np.testing.assert_allclose(quat_to_matrix(q), axis_angle_to_matrix(r), atol=1e-12)


def test_quat_vjp_matches_fd_including_normalization(rng):
    q = rng.normal(size=(4, 4)) * 1.3  # deliberately non-unit
    g = random_grad(rng, (4, 3, 3))

    def f(flat):
        return float(np.sum(quat_to_matrix(flat.reshape(4, 4)) * g))

    analytic = quat_vjp(q, g).ravel()
    numeric = fd_gradient(f, q.ravel().copy())
    np.testing.assert_allclose(analytic, numeric, rtol=1e-6, atol=1e-9)


def test_quat_normalize_unit_norm(rng):
    q = rng.normal(size=(10, 4))
    np.testing.assert_allclose(np.linalg.norm(quat_normalize(q), axis=1), 1.0, atol=1e-15)
