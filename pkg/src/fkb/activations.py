"""Activation functions and their elementwise derivatives."""

from dataclasses import dataclass

from . import kernels

ACTIVATION_KINDS = {
    "linear": kernels.ACT_LINEAR,
    "relu": kernels.ACT_RELU,
    "leakyrelu": kernels.ACT_LEAKYRELU,
    "sigmoid": kernels.ACT_SIGMOID,
    "tanh": kernels.ACT_TANH,
    "softmax": kernels.ACT_SOFTMAX,
}

ACTIVATION_NAMES = tuple(ACTIVATION_KINDS)


@dataclass(frozen=True)
class ActivationSpec:
    name: str
    alpha: float = 0.0  # leaky coefficient; ignored by other activations

    def __post_init__(self):
        if self.name not in ACTIVATION_KINDS:
            raise ValueError(f"unknown activation {self.name!r}")

    @property
    def kind(self) -> int:
        return ACTIVATION_KINDS[self.name]


def apply(spec: ActivationSpec, z):
    return kernels.act_apply(spec.kind, spec.alpha, z)


def derivative(spec: ActivationSpec, z):
    """Diagonal Jacobian at z. Softmax is excluded: its gradient only exists
    fused with cross-entropy."""
    return kernels.act_deriv(spec.kind, spec.alpha, z)


def softmax(z):
    return kernels.softmax(z)
