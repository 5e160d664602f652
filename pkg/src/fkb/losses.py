"""Built-in losses (MSE, cross-entropy) and a registry for custom pairs.

A loss is a (scalar, derivative) pair. gradient_target says what the
derivative is taken with respect to: the network output for generic losses,
or the pre-softmax logits for cross-entropy (where d = y_pred - y_true).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, DuplicateName, LossShapeMismatch, UnknownLoss

NETWORK_OUTPUT = "network_output"
PRESOFTMAX_LOGITS = "presoftmax_logits"

_LOG_CLAMP = 1e-15


@dataclass(frozen=True)
class LossFunction:
    name: str
    loss: callable
    d_loss: callable
    gradient_target: str = NETWORK_OUTPUT


def _check_shapes(y_true, y_pred):
    y_true = np.asarray(y_true, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    if y_true.shape != y_pred.shape or y_true.ndim != 1 or len(y_true) < 1:
        raise LossShapeMismatch(
            f"y_true shape {y_true.shape} vs y_pred shape {y_pred.shape}")
    return y_true, y_pred


def mse(y_true, y_pred):
    y_true, y_pred = _check_shapes(y_true, y_pred)
    diff = y_pred - y_true
    return float(np.mean(diff * diff))


def d_mse(y_true, y_pred):
    y_true, y_pred = _check_shapes(y_true, y_pred)
    return (2.0 / len(y_true)) * (y_pred - y_true)


def crossentropy(y_true, y_pred):
    """-sum(y_true * log(y_pred)), log argument clamped to >= 1e-15."""
    y_true, y_pred = _check_shapes(y_true, y_pred)
    if np.any(y_true < 0.0):
        raise DomainError("y_true must be non-negative")
    return float(-np.sum(y_true * np.log(np.maximum(y_pred, _LOG_CLAMP))))


def d_crossentropy(y_true, y_pred):
    """Gradient w.r.t. the pre-softmax logits: y_pred - y_true."""
    y_true, y_pred = _check_shapes(y_true, y_pred)
    if np.any(y_true < 0.0):
        raise DomainError("y_true must be non-negative")
    return y_pred - y_true


_registry = {}


def register_loss(name, loss, d_loss, gradient_target=NETWORK_OUTPUT):
    if name in _registry:
        raise DuplicateName(f"loss {name!r} already registered")
    if gradient_target not in (NETWORK_OUTPUT, PRESOFTMAX_LOGITS):
        raise ValueError(f"unknown gradient target {gradient_target!r}")
    _registry[name] = LossFunction(name, loss, d_loss, gradient_target)
    return _registry[name]


def get_loss(name) -> LossFunction:
    try:
        return _registry[name]
    except KeyError:
        raise UnknownLoss(f"no loss named {name!r}; known: "
                          f"{sorted(_registry)}") from None


def registered_names():
    return sorted(_registry)


register_loss("mse", mse, d_mse, NETWORK_OUTPUT)
register_loss("crossentropy", crossentropy, d_crossentropy, PRESOFTMAX_LOGITS)
