"""Gradient-descent training loops over CSV-delivered samples.

train_step is the online entry point a host simulator calls once per
timestep; fit is the offline loop (seeded shuffling, batch-averaged SGD).
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, IoError, NumericParseError, RowWidthError
from .layers import TRAINING, DropoutLayer
from .losses import get_loss
from .rng import Xoshiro256StarStar


@dataclass
class TrainConfig:
    learning_rate: float
    epochs: int
    batch_size: int = 1
    loss_name: str = "mse"
    seed: int = 0
    shuffle: bool = True

    def __post_init__(self):
        if self.learning_rate < 0.0:
            raise ValueError("learning_rate must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")


@dataclass
class SampleSet:
    inputs: np.ndarray  # [n, input_dim]
    targets: np.ndarray  # [n, output_dim]

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=np.float64)
        self.targets = np.asarray(self.targets, dtype=np.float64)
        if self.inputs.shape[0] != self.targets.shape[0]:
            raise DimensionMismatch(
                f"{self.inputs.shape[0]} input rows vs "
                f"{self.targets.shape[0]} target rows")

    def __len__(self):
        return self.inputs.shape[0]


def train_step(net, x, y_true, lr):
    """One forward/backprop/update cycle; returns the pre-update loss."""
    x = np.asarray(x, dtype=np.float64)
    y_true = np.asarray(y_true, dtype=np.float64)
    if net.mode != TRAINING:
        net.set_mode(TRAINING)
    net.zero_grads()
    net.forward(x)
    loss = net.backprop(y_true)
    net.update(lr)
    return loss


def fit(net, data: SampleSet, cfg: TrainConfig):
    """Batch-averaged SGD; returns the mean training loss per epoch."""
    loss_fn = get_loss(cfg.loss_name)
    net.bind_loss(loss_fn)
    if len(data) == 0:
        raise DimensionMismatch("empty sample set")
    net.set_mode(TRAINING)

    rng = Xoshiro256StarStar(cfg.seed)
    for i, layer in enumerate(net.layers):
        if isinstance(layer, DropoutLayer):
            layer.reseed((cfg.seed + i + 1) & ((1 << 64) - 1))

    history = []
    order = list(range(len(data)))
    for _ in range(cfg.epochs):
        if cfg.shuffle:
            rng.shuffle(order)
        epoch_loss = 0.0
        for start in range(0, len(order), cfg.batch_size):
            batch = order[start:start + cfg.batch_size]
            net.zero_grads()
            for idx in batch:
                net.forward(data.inputs[idx])
                epoch_loss += net.backprop(data.targets[idx])
            if len(batch) > 1:
                for _, g in net.param_grad_pairs():
                    g /= len(batch)
            net.update(cfg.learning_rate)
        history.append(epoch_loss / len(order))
    return history


def load_csv(path, input_dim, output_dim) -> SampleSet:
    """Read comma-separated samples: first input_dim columns are features,
    the next output_dim are targets. A non-numeric first row is a header."""
    width = input_dim + output_dim
    inputs, targets = [], []
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise IoError(str(exc)) from exc
    with fh:
        rows = [row for row in csv.reader(fh) if row]
    start = 0
    if rows and not _is_numeric_row(rows[0]):
        start = 1
    for rownum, row in enumerate(rows[start:], start=start + 1):
        if len(row) != width:
            raise RowWidthError(rownum, width, len(row))
        values = []
        for tok in row:
            try:
                values.append(float(tok))
            except ValueError:
                raise NumericParseError(rownum, tok) from None
        inputs.append(values[:input_dim])
        targets.append(values[input_dim:])
    return SampleSet(inputs=np.asarray(inputs, dtype=np.float64).reshape(-1, input_dim),
                     targets=np.asarray(targets, dtype=np.float64).reshape(-1, output_dim))


def _is_numeric_row(row):
    for tok in row:
        try:
            float(tok)
        except ValueError:
            return False
    return True
