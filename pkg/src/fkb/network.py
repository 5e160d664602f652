"""Sequential network: ordered layer stack with a bound loss.

The network only chains per-layer forward/backward calls; all math lives in
the layers. The one special case is the fused softmax/cross-entropy path,
where the seed gradient y_pred - y_true is injected below the final softmax.
"""

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidSpec,
    LossShapeMismatch,
    NoCachedForward,
)
from .layers import INFERENCE, TRAINING, DenseLayer, layer_from_spec, layer_to_spec
from .losses import PRESOFTMAX_LOGITS, get_loss
from .model_format import ModelSpec, validate_spec


class Network:
    def __init__(self, layers, loss=None):
        self.layers = list(layers)
        if not self.layers:
            raise InvalidSpec("network needs at least one layer")
        self._check_chain()
        self.loss = None
        if loss is not None:
            self.bind_loss(loss)
        self.mode = INFERENCE
        self._last_output = None
        self.input_gradient = None

    def _check_chain(self):
        dim = self.layers[0].input_dim
        for i, layer in enumerate(self.layers):
            if layer.input_dim != dim:
                raise DimensionMismatch(
                    f"layer {i} expects input {layer.input_dim}, previous "
                    f"layer provides {dim}")
            dim = layer.output_dim

    @property
    def input_dim(self):
        return self.layers[0].input_dim

    @property
    def output_dim(self):
        return self.layers[-1].output_dim

    def _final_is_softmax(self):
        last = self.layers[-1]
        return isinstance(last, DenseLayer) and last.activation.name == "softmax"

    def bind_loss(self, loss):
        """Bind a LossFunction (or registered name). Logit-target losses are
        rejected unless the final layer is a softmax dense layer."""
        if isinstance(loss, str):
            loss = get_loss(loss)
        if loss.gradient_target == PRESOFTMAX_LOGITS and not self._final_is_softmax():
            raise InvalidSpec(
                f"loss {loss.name!r} differentiates w.r.t. logits and requires "
                f"a softmax final layer")
        if self._final_is_softmax() and loss.gradient_target != PRESOFTMAX_LOGITS:
            raise InvalidSpec(
                "a softmax final layer requires a logit-target loss "
                "(its standalone derivative is not exposed)")
        self.loss = loss

    def set_mode(self, mode):
        for layer in self.layers:
            layer.set_mode(mode)
        self.mode = mode
        self._last_output = None

    def forward(self, x):
        """Fold x through every layer; in training mode each layer caches what
        its backward pass needs."""
        x = np.asarray(x, dtype=np.float64)
        if len(x) != self.input_dim:
            raise DimensionMismatch(
                f"network expects input of length {self.input_dim}, got {len(x)}")
        out = x
        for layer in self.layers:
            out = layer.forward(out)
        self._last_output = out
        return out

    def predict(self, x):
        if self.mode != INFERENCE:
            raise InvalidSpec("predict requires inference mode")
        return self.forward(x)

    def backprop(self, y_true):
        """Fill every layer's gradient buffers by chaining backward from the
        bound loss; returns the scalar loss for the most recent forward."""
        if self.loss is None:
            raise InvalidSpec("no loss bound to this network")
        if self._last_output is None:
            raise NoCachedForward("backprop requires a preceding forward call")
        y_true = np.asarray(y_true, dtype=np.float64)
        y_pred = self._last_output
        if y_true.shape != y_pred.shape:
            raise LossShapeMismatch(
                f"y_true shape {y_true.shape} vs prediction shape {y_pred.shape}")
        value = self.loss.loss(y_true, y_pred)
        grad = np.asarray(self.loss.d_loss(y_true, y_pred), dtype=np.float64)
        if grad.shape != y_pred.shape:
            raise LossShapeMismatch(
                f"d_loss shape {grad.shape} vs prediction shape {y_pred.shape}")

        layers = self.layers
        if self.loss.gradient_target == PRESOFTMAX_LOGITS:
            grad = layers[-1].backward_from_logits(grad)
            layers = layers[:-1]
        for layer in reversed(layers):
            grad = layer.backward(grad)
        self.input_gradient = grad
        return value

    def update(self, lr):
        """p <- p - lr * grad for every parameter, then zero the gradients."""
        for layer in self.layers:
            layer.apply_update(lr)

    def param_grad_pairs(self):
        pairs = []
        for layer in self.layers:
            pairs.extend(layer.param_grad_pairs())
        return pairs

    def zero_grads(self):
        for layer in self.layers:
            layer.zero_grads()

    @classmethod
    def from_spec(cls, spec: ModelSpec, loss=None) -> "Network":
        violations = validate_spec(spec)
        if violations:
            raise InvalidSpec("; ".join(violations))
        layers = []
        dim = spec.input_dim
        for layer_spec in spec.layers:
            layer = layer_from_spec(layer_spec, dim)
            dim = layer.output_dim
            layers.append(layer)
        return cls(layers, loss=loss)

    def to_spec(self) -> ModelSpec:
        return ModelSpec(input_dim=self.input_dim,
                         layers=[layer_to_spec(layer) for layer in self.layers])
