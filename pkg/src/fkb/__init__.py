"""Embeddable neural-network runtime with a plain-text model bridge (FKBX).

Inference, online gradient-descent training and noisy ensembles over
sequential dense/dropout/batchnorm networks, built to be driven either from a
host process (per-sample API) or from the `fkb` command line.
"""

from . import errors
from .activations import ActivationSpec
from .ensemble import Ensemble, ensemble_predict, load_ensemble
from .kernels import BACKEND as KERNEL_BACKEND
from .layers import BatchNormLayer, DenseLayer, DropoutLayer
from .losses import LossFunction, get_loss, register_loss
from .model_format import (
    BatchnormSpec,
    DenseSpec,
    DropoutSpec,
    ModelSpec,
    load_model_file,
    parse_model,
    save_model_file,
    serialize_model,
    validate_spec,
)
from .network import Network
from .training import SampleSet, TrainConfig, fit, load_csv, train_step

__version__ = "0.1.0"

__all__ = [
    "ActivationSpec",
    "BatchNormLayer",
    "BatchnormSpec",
    "DenseLayer",
    "DenseSpec",
    "DropoutLayer",
    "DropoutSpec",
    "Ensemble",
    "KERNEL_BACKEND",
    "LossFunction",
    "ModelSpec",
    "Network",
    "SampleSet",
    "TrainConfig",
    "ensemble_predict",
    "errors",
    "fit",
    "get_loss",
    "load_csv",
    "load_ensemble",
    "load_model_file",
    "parse_model",
    "register_loss",
    "save_model_file",
    "serialize_model",
    "train_step",
    "validate_spec",
]
