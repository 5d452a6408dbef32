"""Minimal Adam optimizer over flat numpy parameter vectors."""

from __future__ import annotations

import numpy as np


class Adam:
    """Adaptive-moment gradient descent with bias correction.

    Step rule: p -= lr * m_hat / (sqrt(v_hat) + eps). Deterministic and
    allocation-light; state lives alongside the parameter vector it updates.

    Coordinates whose bias-corrected first moment sits below ``eps`` are
    left untouched: with sqrt(v_hat) << eps the usual update would scale
    float-noise gradients by lr/eps (~1e6 at the default settings), so an
    exact optimum would be an unstable fixed point instead of a stable one.
    """

    def __init__(self, size: int, lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = np.zeros(size)
        self.v = np.zeros(size)

    def step(self, params: np.ndarray, grad: np.ndarray) -> np.ndarray:
        self.t += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * grad * grad
        m_hat = self.m / (1.0 - self.beta1**self.t)
        v_hat = self.v / (1.0 - self.beta2**self.t)
        update = self.lr * m_hat / (np.sqrt(v_hat) + self.eps)
        return params - np.where(np.abs(m_hat) > self.eps, update, 0.0)
