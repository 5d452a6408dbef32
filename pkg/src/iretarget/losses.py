"""Objective terms of the retargeting optimization.

Each term follows the published form exactly:

* kinematic similarity: mean over frames x joints of squared distances to
  the reshaped source positions;
* contact consistency: time-mean squared Frobenius distance between the
  pairwise keypoint-distance matrices of the optimized and original pair;
* partner fidelity: time-mean summed squared displacement of the partner's
  upper-body joints;
* temporal coherence: mean squared first difference of joint angles plus a
  weighted mean squared second difference;
* pose magnitude: mean squared joint angle.

Every ``*_grad`` companion returns the exact gradient used by the
optimizer; the test suite checks each against finite differences.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .validation import as_float_array, require_same_shape

_DIST_EPS = 1e-12


def loss_kin(robot_positions: np.ndarray, reshaped: np.ndarray, mask: np.ndarray | None = None) -> float:
    """Mean squared joint-position error against the reshaped source."""
    robot_positions = as_float_array(robot_positions, "robot_positions")
    reshaped = as_float_array(reshaped, "reshaped")
    require_same_shape(robot_positions, reshaped, "robot_positions", "reshaped")
    diff = robot_positions - reshaped
    if mask is not None:
        diff = diff[:, mask]
    count = diff.shape[0] * diff.shape[1]
    return float(np.sum(diff * diff) / count)


def loss_kin_grad(robot_positions: np.ndarray, reshaped: np.ndarray, mask: np.ndarray | None = None) -> np.ndarray:
    diff = robot_positions - reshaped
    if mask is not None:
        diff = np.where(mask[None, :, None], diff, 0.0)
        count = diff.shape[0] * int(np.count_nonzero(mask))
    else:
        count = diff.shape[0] * diff.shape[1]
    return 2.0 * diff / count


def pairwise_distance_matrix(points: np.ndarray) -> np.ndarray:
    """Symmetric zero-diagonal Euclidean distance matrix for (N, 3) points."""
    points = as_float_array(points, "points")
    if points.ndim != 2 or points.shape[0] < 2 or points.shape[1] != 3:
        raise ValidationError(f"points must be (N>=2, 3), got {points.shape}")
    return distance_matrices(points[None])[0]


def distance_matrices(points: np.ndarray) -> np.ndarray:
    """Stack of pairwise distance matrices for (T, N, 3) points -> (T, N, N)."""
    diff = points[:, :, None, :] - points[:, None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def loss_con(opt_matrices: np.ndarray, orig_matrices: np.ndarray) -> float:
    """Time-mean squared Frobenius distance between distance-matrix stacks."""
    opt_matrices = as_float_array(opt_matrices, "opt_matrices")
    orig_matrices = as_float_array(orig_matrices, "orig_matrices")
    require_same_shape(opt_matrices, orig_matrices, "opt_matrices", "orig_matrices")
    diff = opt_matrices - orig_matrices
    return float(np.sum(diff * diff) / opt_matrices.shape[0])


def loss_con_value_and_grad(points: np.ndarray, orig_matrices: np.ndarray) -> tuple[float, np.ndarray]:
    """Contact loss of (T, N, 3) keypoints plus its gradient w.r.t. the points."""
    diff = points[:, :, None, :] - points[:, None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    T = points.shape[0]
    delta = dist - orig_matrices
    value = float(np.sum(delta * delta) / T)
    # d dist_ij / d x_i = (x_i - x_j) / dist_ij; symmetric counterpart doubles it
    unit = diff / np.maximum(dist, _DIST_EPS)[..., None]
    grad_dist = 2.0 * delta / T
    grad_points = 2.0 * np.einsum("tij,tijd->tid", grad_dist, unit)
    return value, grad_points


def loss_hum(adjusted: np.ndarray, original: np.ndarray) -> float:
    """Time-mean summed squared deviation of the partner's upper-body joints."""
    adjusted = as_float_array(adjusted, "adjusted")
    original = as_float_array(original, "original")
    require_same_shape(adjusted, original, "adjusted", "original")
    diff = adjusted - original
    return float(np.sum(diff * diff) / adjusted.shape[0])


def loss_hum_grad(adjusted: np.ndarray, original: np.ndarray) -> np.ndarray:
    return 2.0 * (adjusted - original) / adjusted.shape[0]


def loss_temp(joint_params: np.ndarray, w_accel: float = 1.0) -> float:
    """Velocity plus weighted acceleration penalty on joint-angle trajectories."""
    q = as_float_array(joint_params, "joint_params")
    if q.ndim != 2 or q.shape[0] < 3:
        raise ValidationError("loss_temp needs a (T>=3, D) trajectory (acceleration undefined otherwise)")
    v = np.diff(q, axis=0)
    a = np.diff(v, axis=0)
    return float(np.sum(v * v) / v.shape[0] + w_accel * np.sum(a * a) / a.shape[0])


def loss_temp_grad(joint_params: np.ndarray, w_accel: float = 1.0) -> np.ndarray:
    q = joint_params
    T = q.shape[0]
    v = np.diff(q, axis=0)
    a = np.diff(v, axis=0)
    grad = np.zeros_like(q)
    gv = 2.0 * v / (T - 1)
    grad[1:] += gv
    grad[:-1] -= gv
    ga = 2.0 * w_accel * a / (T - 2)
    grad[2:] += ga
    grad[1:-1] -= 2.0 * ga
    grad[:-2] += ga
    return grad


def loss_pose(joint_params: np.ndarray) -> float:
    """Mean squared joint angle over all frames and DoF."""
    q = as_float_array(joint_params, "joint_params")
    return float(np.mean(q * q))


def loss_pose_grad(joint_params: np.ndarray) -> np.ndarray:
    return 2.0 * joint_params / joint_params.size
