"""Gaussian trajectory smoothing (kernel 5, sigma 0.75 by default).

Per-channel 1-D convolution with a normalized Gaussian kernel and edge
replication at the boundaries, so constant signals pass through unchanged
and endpoints are not pulled toward zero. Because the kernel is a convex
combination, smoothed joint angles stay inside any limits the raw ones
satisfied.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .kinematics import MotionSequence
from .rotations import quat_normalize
from .validation import as_float_array, require


def gaussian_kernel(kernel_size: int = 5, sigma: float = 0.75) -> np.ndarray:
    require(kernel_size >= 1 and kernel_size % 2 == 1, "kernel_size must be odd and >= 1")
    require(sigma > 0, "sigma must be positive")
    half = kernel_size // 2
    offsets = np.arange(-half, half + 1, dtype=np.float64)
    weights = np.exp(-0.5 * (offsets / sigma) ** 2)
    return weights / weights.sum()


def gaussian_smooth(sequence: np.ndarray, kernel_size: int = 5, sigma: float = 0.75) -> np.ndarray:
    """Smooth a (T,) or (T, D) signal along time with edge replication."""
    x = as_float_array(sequence, "sequence")
    squeeze = x.ndim == 1
    if squeeze:
        x = x[:, None]
    weights = gaussian_kernel(kernel_size, sigma)
    half = kernel_size // 2
    padded = np.pad(x, ((half, half), (0, 0)), mode="edge")
    out = np.zeros_like(x)
    T = x.shape[0]
    for k, w in enumerate(weights):
        out += w * padded[k : k + T]
    return out[:, 0] if squeeze else out


def smooth_motion(motion: MotionSequence, kernel_size: int = 5, sigma: float = 0.75) -> MotionSequence:
    """Smooth joint parameters and root translation; root quaternions are
    convolved componentwise and renormalized."""
    params = gaussian_smooth(motion.joint_params, kernel_size, sigma)
    root_pos = gaussian_smooth(motion.root_pos, kernel_size, sigma)
    root_quat = quat_normalize(gaussian_smooth(motion.root_quat, kernel_size, sigma))
    return MotionSequence(motion.skeleton, params, root_pos, root_quat, motion.fps)


class GaussianSmoother(BaseEstimator, TransformerMixin):
    """Transformer form of :func:`gaussian_smooth` for (T, D) arrays."""

    def __init__(self, kernel_size: int = 5, sigma: float = 0.75):
        self.kernel_size = kernel_size
        self.sigma = sigma

    def fit(self, X, y=None):
        gaussian_kernel(self.kernel_size, self.sigma)  # validates parameters
        return self

    def transform(self, X) -> np.ndarray:
        return gaussian_smooth(X, self.kernel_size, self.sigma)
