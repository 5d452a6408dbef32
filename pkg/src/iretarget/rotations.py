"""Batched rotation primitives and their reverse-mode derivatives.

Every forward function maps a (T, ...) parameter batch to (T, 3, 3)
rotation matrices; the matching ``*_vjp`` function pulls a loss gradient
with respect to the matrices back onto the parameters. The pair is what
the kinematics backward pass is built from, and each one is checked
against central finite differences in the test suite.

Axis-angle uses the unnormalized vector form, which is smooth at the
identity; coefficient functions switch to series below ``_SMALL_ANGLE``
to stay accurate there.
"""

from __future__ import annotations

import numpy as np

_SMALL_ANGLE = 1e-4


def skew(v: np.ndarray) -> np.ndarray:
    """(T,3) vectors -> (T,3,3) cross-product matrices."""
    v = np.asarray(v, dtype=np.float64)
    out = np.zeros(v.shape[:-1] + (3, 3))
    x, y, z = v[..., 0], v[..., 1], v[..., 2]
    out[..., 0, 1] = -z
    out[..., 0, 2] = y
    out[..., 1, 0] = z
    out[..., 1, 2] = -x
    out[..., 2, 0] = -y
    out[..., 2, 1] = x
    return out


def _vee_antisym(m: np.ndarray) -> np.ndarray:
    """<skew(u), M> = u . _vee_antisym(M) for every u."""
    return np.stack(
        [
            m[..., 2, 1] - m[..., 1, 2],
            m[..., 0, 2] - m[..., 2, 0],
            m[..., 1, 0] - m[..., 0, 1],
        ],
        axis=-1,
    )


def _aa_coeffs(theta_sq: np.ndarray):
    """a = sin(t)/t, b = (1-cos(t))/t^2 and the scaled derivatives
    c1 = a'(t)/t, c2 = b'(t)/t, all smooth functions of t^2."""
    theta = np.sqrt(theta_sq)
    small = theta < _SMALL_ANGLE
    safe = np.where(small, 1.0, theta)
    a = np.where(small, 1.0 - theta_sq / 6.0, np.sin(safe) / safe)
    b = np.where(small, 0.5 - theta_sq / 24.0, (1.0 - np.cos(safe)) / safe**2)
    c1 = np.where(
        small,
        -1.0 / 3.0 + theta_sq / 30.0,
        (safe * np.cos(safe) - np.sin(safe)) / safe**3,
    )
    c2 = np.where(
        small,
        -1.0 / 12.0 + theta_sq / 180.0,
        (safe * np.sin(safe) - 2.0 * (1.0 - np.cos(safe))) / safe**4,
    )
    return a, b, c1, c2


def axis_angle_to_matrix(r: np.ndarray) -> np.ndarray:
    """Rodrigues formula for unnormalized axis-angle vectors, (T,3) -> (T,3,3)."""
    r = np.asarray(r, dtype=np.float64)
    theta_sq = np.sum(r * r, axis=-1)
    a, b, _, _ = _aa_coeffs(theta_sq)
    k = skew(r)
    k2 = k @ k
    eye = np.broadcast_to(np.eye(3), k.shape)
    return eye + a[..., None, None] * k + b[..., None, None] * k2


def axis_angle_vjp(r: np.ndarray, grad_matrix: np.ndarray) -> np.ndarray:
    """Pull (T,3,3) matrix gradients back to (T,3) axis-angle gradients."""
    r = np.asarray(r, dtype=np.float64)
    g = np.asarray(grad_matrix, dtype=np.float64)
    theta_sq = np.sum(r * r, axis=-1)
    a, b, c1, c2 = _aa_coeffs(theta_sq)
    k = skew(r)
    k2 = k @ k
    s1 = np.sum(g * k, axis=(-2, -1))
    s2 = np.sum(g * k2, axis=(-2, -1))
    radial = (c1 * s1 + c2 * s2)[..., None] * r
    term_a = a[..., None] * _vee_antisym(g)
    term_b = -b[..., None] * _vee_antisym(g @ k + k @ g)
    return radial + term_a + term_b


def revolute_to_matrix(theta: np.ndarray, axis: np.ndarray) -> np.ndarray:
    """Rotation about a fixed unit axis, (T,) angles -> (T,3,3)."""
    theta = np.asarray(theta, dtype=np.float64)
    k = skew(np.asarray(axis, dtype=np.float64))
    k2 = k @ k
    s = np.sin(theta)[..., None, None]
    c = (1.0 - np.cos(theta))[..., None, None]
    return np.eye(3) + s * k + c * k2


def revolute_vjp(theta: np.ndarray, axis: np.ndarray, grad_matrix: np.ndarray) -> np.ndarray:
    theta = np.asarray(theta, dtype=np.float64)
    k = skew(np.asarray(axis, dtype=np.float64))
    k2 = k @ k
    dr = np.cos(theta)[..., None, None] * k + np.sin(theta)[..., None, None] * k2
    return np.sum(grad_matrix * dr, axis=(-2, -1))


def quat_normalize(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def quat_to_matrix(q: np.ndarray, *, normalized: bool = False) -> np.ndarray:
    """(w,x,y,z) quaternions, (T,4) -> (T,3,3). Normalizes unless told not to."""
    n = np.asarray(q, dtype=np.float64) if normalized else quat_normalize(q)
    w, x, y, z = n[..., 0], n[..., 1], n[..., 2], n[..., 3]
    out = np.empty(n.shape[:-1] + (3, 3))
    out[..., 0, 0] = 1.0 - 2.0 * (y * y + z * z)
    out[..., 0, 1] = 2.0 * (x * y - w * z)
    out[..., 0, 2] = 2.0 * (x * z + w * y)
    out[..., 1, 0] = 2.0 * (x * y + w * z)
    out[..., 1, 1] = 1.0 - 2.0 * (x * x + z * z)
    out[..., 1, 2] = 2.0 * (y * z - w * x)
    out[..., 2, 0] = 2.0 * (x * z - w * y)
    out[..., 2, 1] = 2.0 * (y * z + w * x)
    out[..., 2, 2] = 1.0 - 2.0 * (x * x + y * y)
    return out


def _quat_matrix_vjp_normalized(n: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Gradient with respect to an already-normalized quaternion."""
    w, x, y, z = n[..., 0], n[..., 1], n[..., 2], n[..., 3]

    def e(i, j):
        return g[..., i, j]

    gw = 2.0 * (
        -z * e(0, 1) + y * e(0, 2) + z * e(1, 0) - x * e(1, 2) - y * e(2, 0) + x * e(2, 1)
    )
    gx = 2.0 * (
        y * e(0, 1) + z * e(0, 2) + y * e(1, 0) - 2.0 * x * e(1, 1) - w * e(1, 2)
        + z * e(2, 0) + w * e(2, 1) - 2.0 * x * e(2, 2)
    )
    gy = 2.0 * (
        -2.0 * y * e(0, 0) + x * e(0, 1) + w * e(0, 2) + x * e(1, 0) + z * e(1, 2)
        - w * e(2, 0) + z * e(2, 1) - 2.0 * y * e(2, 2)
    )
    gz = 2.0 * (
        -2.0 * z * e(0, 0) - w * e(0, 1) + x * e(0, 2) + w * e(1, 0) - 2.0 * z * e(1, 1)
        + y * e(1, 2) + x * e(2, 0) + y * e(2, 1)
    )
    return np.stack([gw, gx, gy, gz], axis=-1)


def quat_vjp(q: np.ndarray, grad_matrix: np.ndarray) -> np.ndarray:
    """Pull matrix gradients back to the raw (possibly unnormalized) quaternion.

    Includes the Jacobian of the internal normalization, so finite
    differences on raw coordinates agree with this gradient.
    """
    q = np.asarray(q, dtype=np.float64)
    norm = np.linalg.norm(q, axis=-1, keepdims=True)
    n = q / norm
    gn = _quat_matrix_vjp_normalized(n, np.asarray(grad_matrix, dtype=np.float64))
    return (gn - np.sum(gn * n, axis=-1, keepdims=True) * n) / norm
