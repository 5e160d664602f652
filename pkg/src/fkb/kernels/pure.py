"""Pure-numpy kernel implementations (fallback when the extension is absent)."""

import numpy as np

ACT_LINEAR = 0
ACT_RELU = 1
ACT_LEAKYRELU = 2
ACT_SIGMOID = 3
ACT_TANH = 4
ACT_SOFTMAX = 5


def affine(W, b, x):
    """W @ x + b for W of shape [out, in]."""
    return W @ x + b


def affine_grads(W, x, delta):
    """Given delta = dL/dz, return (dW, db, dx)."""
    return np.outer(delta, x), delta.copy(), W.T @ delta


def act_apply(kind, alpha, z):
    if kind == ACT_LINEAR:
        return z.copy()
    if kind == ACT_RELU:
        return np.maximum(z, 0.0)
    if kind == ACT_LEAKYRELU:
        return np.where(z >= 0.0, z, alpha * z)
    if kind == ACT_SIGMOID:
        return 1.0 / (1.0 + np.exp(-z))
    if kind == ACT_TANH:
        return np.tanh(z)
    if kind == ACT_SOFTMAX:
        return softmax(z)
    raise ValueError(f"unknown activation kind {kind}")


def act_deriv(kind, alpha, z):
    """Elementwise derivative at pre-activation z; softmax is never exposed here."""
    if kind == ACT_LINEAR:
        return np.ones_like(z)
    if kind == ACT_RELU:
        return (z > 0.0).astype(np.float64)
    if kind == ACT_LEAKYRELU:
        return np.where(z > 0.0, 1.0, alpha)
    if kind == ACT_SIGMOID:
        s = 1.0 / (1.0 + np.exp(-z))
        return s * (1.0 - s)
    if kind == ACT_TANH:
        t = np.tanh(z)
        return 1.0 - t * t
    raise ValueError(f"no standalone derivative for activation kind {kind}")


def softmax(z):
    """Max-subtracted softmax."""
    e = np.exp(z - np.max(z))
    return e / np.sum(e)
