"""Ensembles: a directory of models evaluated with per-member Gaussian input
noise and equal-weight averaging in fixed member order."""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyDirectory,
    EnsembleLoadError,
    FkbError,
    HeterogeneousDimensions,
)
from .model_format import load_model_file
from .network import Network
from .rng import Xoshiro256StarStar

MODEL_EXTENSION = ".fkbx"


class Ensemble:
    def __init__(self, members, noise=0.0, seed=0):
        if not members:
            raise EmptyDirectory("ensemble needs at least one member")
        if noise < 0.0:
            raise ValueError("noise must be >= 0")
        dims = {(m.input_dim, m.output_dim) for m in members}
        if len(dims) > 1:
            raise HeterogeneousDimensions(
                f"members disagree on (input_dim, output_dim): {sorted(dims)}")
        self.members = list(members)
        self.noise = float(noise)
        self.seed = int(seed)
        # One persistent stream per member so each call sees fresh draws while
        # the whole call sequence stays reproducible from the seed.
        self._streams = [Xoshiro256StarStar.substream(self.seed, k)
                         for k in range(len(members))]

    @property
    def input_dim(self):
        return self.members[0].input_dim

    @property
    def output_dim(self):
        return self.members[0].output_dim

    def predict(self, x, workers=1):
        """Noise-perturbed, averaged prediction.

        Perturbations are drawn serially in member order before any member
        runs, and the mean is summed in member order, so the result does not
        depend on how many worker threads evaluate the members.
        """
        x = np.asarray(x, dtype=np.float64)
        if len(x) != self.input_dim:
            raise DimensionMismatch(
                f"ensemble expects input of length {self.input_dim}, "
                f"got {len(x)}")
        inputs = []
        for k in range(len(self.members)):
            if self.noise > 0.0:
                stream = self._streams[k]
                eps = np.array([stream.gauss() for _ in range(len(x))])
                inputs.append(x + self.noise * eps)
            else:
                inputs.append(x)

        if workers > 1 and len(self.members) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                preds = list(pool.map(lambda mx: mx[0].predict(mx[1]),
                                      zip(self.members, inputs)))
        else:
            preds = [m.predict(xi) for m, xi in zip(self.members, inputs)]

        acc = preds[0].copy()
        for p in preds[1:]:
            acc += p
        return acc / len(preds)


def load_ensemble(dir_path, noise=0.0, seed=0) -> Ensemble:
    """Load every *.fkbx file in dir_path (lexicographic filename order)."""
    names = sorted(n for n in os.listdir(dir_path)
                   if n.endswith(MODEL_EXTENSION))
    if not names:
        raise EmptyDirectory(f"no {MODEL_EXTENSION} files in {dir_path}")
    members, failures = [], {}
    for name in names:
        try:
            spec = load_model_file(os.path.join(dir_path, name))
            members.append(Network.from_spec(spec))
        except FkbError as exc:
            failures[name] = exc
    if failures:
        raise EnsembleLoadError(failures)
    return Ensemble(members, noise=noise, seed=seed)


def ensemble_predict(e: Ensemble, x, workers=1):
    return e.predict(x, workers=workers)
