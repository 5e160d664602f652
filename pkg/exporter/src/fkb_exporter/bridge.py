"""Conversion between Keras HDF5 archives and FKBX.

Only sequential stacks of dense/dropout/batch-normalization layers cross the
bridge; anything else is a hard error, never a silent drop. Optimizer state
and training configuration stay behind and are reported in skipped_attributes.
"""

import logging
import os
import warnings
from dataclasses import dataclass, field

import h5py
import numpy as np

from . import fkbx
from .errors import (
    IoError,
    NonSequentialTopology,
    UnsupportedActivation,
    UnsupportedLayer,
)

os.environ.setdefault("TF_CPP_MIN_LOG_LEVEL", "3")

import keras  # noqa: E402  (after the log-level default)
from keras import layers as klayers  # noqa: E402

# the legacy-HDF5 nag on every save goes through absl, not warnings
logging.getLogger("absl").setLevel(logging.ERROR)

_SIMPLE_ACTIVATIONS = ("linear", "relu", "sigmoid", "tanh", "softmax")
# slope used when leaky relu is spelled as an activation string, which
# cannot carry a coefficient of its own
_LEAKY_DEFAULT_SLOPE = 0.2


@dataclass
class ExportReport:
    layers_converted: int
    skipped_attributes: list = field(default_factory=list)
    warnings: list = field(default_factory=list)


def _activation_name(fn):
    return getattr(fn, "__name__", str(fn))


def _fold_activation(records, name, alpha, layer_name):
    """Attach an activation carried by a standalone layer to the preceding
    linear dense record."""
    if not records or records[-1].kind != "dense" \
            or records[-1].activation != "linear":
        raise UnsupportedLayer(
            f"activation layer {layer_name!r} must directly follow a dense "
            f"layer with linear activation")
    records[-1].activation = name
    records[-1].alpha = alpha


def _convert_dense(layer, report):
    name = _activation_name(layer.activation)
    alpha = 0.0
    if name == "leaky_relu":
        name = "leakyrelu"
        alpha = _LEAKY_DEFAULT_SLOPE
        report.warnings.append(
            f"dense layer {layer.name!r}: activation 'leaky_relu' exported "
            f"with the default slope {_LEAKY_DEFAULT_SLOPE}")
    elif name not in _SIMPLE_ACTIVATIONS:
        raise UnsupportedActivation(
            f"dense layer {layer.name!r}: activation {name!r}")
    weights = layer.kernel.numpy().T.astype(np.float64)
    if layer.bias is not None:
        biases = layer.bias.numpy().astype(np.float64)
    else:
        biases = np.zeros(weights.shape[0])
        report.warnings.append(
            f"dense layer {layer.name!r}: no bias, exported as zeros")
    return fkbx.DenseRecord(weights=weights, biases=biases,
                            activation=name, alpha=alpha)


def _convert_batchnorm(layer, report):
    axis = layer.axis[0] if isinstance(layer.axis, (list, tuple)) else layer.axis
    if axis not in (-1, 1):
        raise UnsupportedLayer(
            f"batch normalization {layer.name!r}: axis {axis} on feature "
            f"vectors is unsupported")
    dim = int(layer.moving_mean.shape[0])
    if layer.scale:
        gamma = layer.gamma.numpy().astype(np.float64)
    else:
        gamma = np.ones(dim)
        report.warnings.append(
            f"batch normalization {layer.name!r}: scale disabled, "
            f"gamma exported as ones")
    if layer.center:
        beta = layer.beta.numpy().astype(np.float64)
    else:
        beta = np.zeros(dim)
        report.warnings.append(
            f"batch normalization {layer.name!r}: center disabled, "
            f"beta exported as zeros")
    return fkbx.BatchnormRecord(
        epsilon=float(layer.epsilon), gamma=gamma, beta=beta,
        moving_mean=layer.moving_mean.numpy().astype(np.float64),
        moving_variance=layer.moving_variance.numpy().astype(np.float64))


def _skipped_attributes(h5_path):
    skipped = []
    try:
        with h5py.File(h5_path, "r") as archive:
            if "optimizer_weights" in archive:
                skipped.append("optimizer_weights")
            if "training_config" in archive.attrs:
                skipped.append("training_config")
    except OSError:
        pass
    return skipped


def export_to_fkbx(h5_path, fkbx_path) -> ExportReport:
    """Convert a sequential HDF5 model archive to an FKBX file."""
    try:
        model = keras.models.load_model(h5_path, compile=False)
    except OSError as exc:
        raise IoError(str(exc)) from exc
    if not isinstance(model, keras.Sequential):
        raise NonSequentialTopology(
            f"expected a sequential model, got {type(model).__name__}")

    report = ExportReport(layers_converted=0,
                          skipped_attributes=_skipped_attributes(h5_path))
    records = []
    for layer in model.layers:
        if isinstance(layer, klayers.InputLayer):
            continue
        if isinstance(layer, klayers.Dense):
            records.append(_convert_dense(layer, report))
        elif isinstance(layer, klayers.Dropout):
            records.append(fkbx.DropoutRecord(rate=float(layer.rate)))
        elif isinstance(layer, klayers.BatchNormalization):
            records.append(_convert_batchnorm(layer, report))
        elif isinstance(layer, klayers.LeakyReLU):
            _fold_activation(records, "leakyrelu",
                             float(layer.negative_slope), layer.name)
        elif isinstance(layer, klayers.Activation):
            name = _activation_name(layer.activation)
            if name == "leaky_relu":
                _fold_activation(records, "leakyrelu", _LEAKY_DEFAULT_SLOPE,
                                 layer.name)
            elif name in _SIMPLE_ACTIVATIONS:
                _fold_activation(records, name, 0.0, layer.name)
            else:
                raise UnsupportedActivation(
                    f"activation layer {layer.name!r}: {name!r}")
        else:
            raise UnsupportedLayer(type(layer).__name__)
    if not records:
        raise UnsupportedLayer("model has no convertible layers")
    shape = model.input_shape
    if len(shape) != 2:
        raise UnsupportedLayer(
            f"expected flat feature-vector input, got shape {shape}")

    text = fkbx.write_model(fkbx.FkbxModel(input_dim=int(shape[1]),
                                           layers=records))
    try:
        with open(fkbx_path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(str(exc)) from exc
    report.layers_converted = len(records)
    return report


def import_from_fkbx(fkbx_path, h5_path) -> ExportReport:
    """Rebuild a Keras model from an FKBX file and save it as HDF5."""
    try:
        with open(fkbx_path) as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(str(exc)) from exc
    spec = fkbx.read_model(text)

    model = keras.Sequential()
    model.add(keras.Input(shape=(spec.input_dim,)))
    for rec in spec.layers:
        if rec.kind == "dense":
            if rec.activation == "leakyrelu":
                dense = klayers.Dense(rec.output_dim)
                model.add(dense)
                model.add(klayers.LeakyReLU(negative_slope=rec.alpha))
            else:
                dense = klayers.Dense(rec.output_dim, activation=rec.activation)
                model.add(dense)
            dense.set_weights([rec.weights.T, rec.biases])
        elif rec.kind == "dropout":
            model.add(klayers.Dropout(rec.rate))
        else:
            bn = klayers.BatchNormalization(epsilon=rec.epsilon)
            model.add(bn)
            bn.set_weights([rec.gamma, rec.beta,
                            rec.moving_mean, rec.moving_variance])

    try:
        with warnings.catch_warnings():
            # keras flags .h5 as legacy; that is exactly the format wanted here
            warnings.simplefilter("ignore")
            model.save(h5_path)
    except OSError as exc:
        raise IoError(str(exc)) from exc
    return ExportReport(layers_converted=len(spec.layers))
