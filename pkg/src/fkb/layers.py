"""Runtime layers: each layer owns its forward/backward computation and,
in training mode, the caches and parameter-gradient buffers backprop needs."""

import numpy as np

from . import activations, kernels
from .errors import DimensionMismatch, NoCachedForward
from .model_format import BatchnormSpec, DenseSpec, DropoutSpec
from .rng import Xoshiro256StarStar

INFERENCE = "inference"
TRAINING = "training"

_MIN_EPSILON = 1e-12


class LayerBase:
    def __init__(self):
        self.mode = INFERENCE

    def set_mode(self, mode):
        if mode not in (INFERENCE, TRAINING):
            raise ValueError(f"unknown mode {mode!r}")
        self.mode = mode
        self._clear_cache()

    def _clear_cache(self):
        pass

    def param_grad_pairs(self):
        """(parameter, gradient) array pairs; gradient shapes mirror parameters."""
        return []

    def zero_grads(self):
        for _, g in self.param_grad_pairs():
            g.fill(0.0)

    def apply_update(self, lr):
        if lr != 0.0:  # lr 0 must leave parameters bit-identical (even -0.0)
            for p, g in self.param_grad_pairs():
                p -= lr * g
        self.zero_grads()

    def _check_dim(self, x, dim):
        if len(x) != dim:
            raise DimensionMismatch(
                f"{type(self).__name__} expects input of length {dim}, "
                f"got {len(x)}")


class DenseLayer(LayerBase):
    """y = activation(W @ x + b) with W of shape [out_dim, in_dim]."""

    kind = "dense"

    def __init__(self, weights, biases, activation):
        super().__init__()
        self.weights = np.ascontiguousarray(weights, dtype=np.float64)
        self.biases = np.ascontiguousarray(biases, dtype=np.float64)
        self.activation = activation
        self.grad_weights = np.zeros_like(self.weights)
        self.grad_biases = np.zeros_like(self.biases)
        self._cached_input = None
        self._cached_preact = None

    @property
    def input_dim(self):
        return self.weights.shape[1]

    @property
    def output_dim(self):
        return self.weights.shape[0]

    def _clear_cache(self):
        self._cached_input = None
        self._cached_preact = None

    def param_grad_pairs(self):
        return [(self.weights, self.grad_weights),
                (self.biases, self.grad_biases)]

    def forward(self, x):
        self._check_dim(x, self.input_dim)
        x = np.ascontiguousarray(x, dtype=np.float64)
        z = kernels.affine(self.weights, self.biases, x)
        if self.mode == TRAINING:
            self._cached_input = x
            self._cached_preact = z
        return activations.apply(self.activation, z)

    def backward(self, upstream):
        """Chain upstream dL/dy through the activation; softmax layers must use
        backward_from_logits (the derivative only exists fused with the loss)."""
        delta = upstream * activations.derivative(self.activation,
                                                  self._require_cache())
        return self._backward_delta(delta)

    def backward_from_logits(self, delta):
        """Backward pass given dL/dz directly (fused softmax/cross-entropy)."""
        self._require_cache()
        return self._backward_delta(np.ascontiguousarray(delta, dtype=np.float64))

    def _require_cache(self):
        if self._cached_preact is None:
            raise NoCachedForward("dense backward requires a prior forward "
                                  "call in training mode")
        return self._cached_preact

    def _backward_delta(self, delta):
        if len(delta) != self.output_dim:
            raise DimensionMismatch(
                f"upstream gradient length {len(delta)} != output_dim "
                f"{self.output_dim}")
        dW, db, dx = kernels.affine_grads(self.weights, self._cached_input, delta)
        self.grad_weights += dW
        self.grad_biases += db
        return dx


class DropoutLayer(LayerBase):
    """Inverted dropout: identity at inference; at training each component is
    kept with probability 1-rate and scaled by 1/(1-rate)."""

    kind = "dropout"

    def __init__(self, rate, dim, seed=0):
        super().__init__()
        self.rate = float(rate)
        self.dim = int(dim)
        self._rng = Xoshiro256StarStar(seed)
        self._mask = None

    def reseed(self, seed):
        self._rng = Xoshiro256StarStar(seed)

    @property
    def input_dim(self):
        return self.dim

    @property
    def output_dim(self):
        return self.dim

    def _clear_cache(self):
        self._mask = None

    def forward(self, x):
        self._check_dim(x, self.dim)
        x = np.asarray(x, dtype=np.float64)
        if self.mode == INFERENCE:
            return x.copy()
        if self.rate == 0.0:
            self._mask = np.ones(self.dim)
            return x.copy()
        scale = 1.0 / (1.0 - self.rate)
        mask = np.empty(self.dim)
        for i in range(self.dim):
            mask[i] = scale if self._rng.random() >= self.rate else 0.0
        self._mask = mask
        return x * mask

    def backward(self, upstream):
        if self._mask is None:
            raise NoCachedForward("dropout backward requires a prior forward "
                                  "call in training mode")
        if len(upstream) != self.dim:
            raise DimensionMismatch(
                f"upstream gradient length {len(upstream)} != dim {self.dim}")
        return upstream * self._mask


class BatchNormLayer(LayerBase):
    """Frozen-statistics batch normalization: y = gamma*(x-mu)/sqrt(var+eps)+beta.
    Moving statistics are constants; gradients flow to gamma and beta only."""

    kind = "batchnorm"

    def __init__(self, epsilon, gamma, beta, moving_mean, moving_variance):
        super().__init__()
        self.epsilon = float(epsilon)
        self.gamma = np.asarray(gamma, dtype=np.float64).copy()
        self.beta = np.asarray(beta, dtype=np.float64).copy()
        self.moving_mean = np.asarray(moving_mean, dtype=np.float64).copy()
        self.moving_variance = np.asarray(moving_variance, dtype=np.float64).copy()
        self.grad_gamma = np.zeros_like(self.gamma)
        self.grad_beta = np.zeros_like(self.beta)
        # epsilon 0 is treated as 1e-12 so degenerate variances stay finite;
        # the declared epsilon is kept verbatim for lossless spec round trips.
        self._inv_std = 1.0 / np.sqrt(self.moving_variance
                                      + max(self.epsilon, _MIN_EPSILON))
        self._cached_input = None

    @property
    def dim(self):
        return len(self.gamma)

    input_dim = dim
    output_dim = dim

    def _clear_cache(self):
        self._cached_input = None

    def param_grad_pairs(self):
        return [(self.gamma, self.grad_gamma), (self.beta, self.grad_beta)]

    def forward(self, x):
        self._check_dim(x, self.dim)
        x = np.asarray(x, dtype=np.float64)
        if self.mode == TRAINING:
            self._cached_input = x.copy()
        return self.gamma * (x - self.moving_mean) * self._inv_std + self.beta

    def backward(self, upstream):
        if self._cached_input is None:
            raise NoCachedForward("batchnorm backward requires a prior forward "
                                  "call in training mode")
        if len(upstream) != self.dim:
            raise DimensionMismatch(
                f"upstream gradient length {len(upstream)} != dim {self.dim}")
        xhat = (self._cached_input - self.moving_mean) * self._inv_std
        self.grad_gamma += upstream * xhat
        self.grad_beta += upstream
        return upstream * self.gamma * self._inv_std


def layer_from_spec(spec, input_dim):
    if isinstance(spec, DenseSpec):
        return DenseLayer(spec.weights.copy(), spec.biases.copy(), spec.activation)
    if isinstance(spec, DropoutSpec):
        return DropoutLayer(spec.rate, dim=input_dim)
    if isinstance(spec, BatchnormSpec):
        return BatchNormLayer(spec.epsilon, spec.gamma, spec.beta,
                              spec.moving_mean, spec.moving_variance)
    raise TypeError(f"unknown layer spec {type(spec).__name__}")


def layer_to_spec(layer):
    if isinstance(layer, DenseLayer):
        return DenseSpec(weights=layer.weights.copy(), biases=layer.biases.copy(),
                         activation=layer.activation)
    if isinstance(layer, DropoutLayer):
        return DropoutSpec(rate=layer.rate)
    if isinstance(layer, BatchNormLayer):
        return BatchnormSpec(epsilon=layer.epsilon, gamma=layer.gamma.copy(),
                             beta=layer.beta.copy(),
                             moving_mean=layer.moving_mean.copy(),
                             moving_variance=layer.moving_variance.copy())
    raise TypeError(f"unknown layer {type(layer).__name__}")
