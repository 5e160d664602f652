"""FKBX plain-text model format: parsing, validation, canonical serialization.

An FKBX file is a whitespace-separated token stream (``#`` starts a comment
running to end of line) describing a sequential network:

    FKBX 1
    layers <N>
    input <D0>
    dense <out_dim> <activation> <alpha>
    b <out_dim floats>
    W <in_dim floats>            (one line per output unit)
    dropout <rate>
    batchnorm <epsilon>
    gamma/beta/mean/variance <dim floats>

Canonical form (what serialize_model emits) is one record per line, single
spaces, no comments, floats at 17 significant digits so 64-bit values
round-trip exactly.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .activations import ACTIVATION_NAMES, ActivationSpec
from .errors import (
    BadMagic,
    DimensionMismatch,
    DomainError,
    FormatSyntaxError,
    InvalidSpec,
    UnsupportedLayer,
)

FORMAT_VERSION = 1

_KEYWORDS = frozenset(
    ["dense", "dropout", "batchnorm", "b", "W", "gamma", "beta", "mean",
     "variance", "layers", "input", "FKBX"]
)


@dataclass(eq=False)
class DenseSpec:
    weights: np.ndarray  # [out_dim, in_dim]
    biases: np.ndarray  # [out_dim]
    activation: ActivationSpec

    kind = "dense"

    @property
    def input_dim(self):
        return self.weights.shape[1]

    @property
    def output_dim(self):
        return self.weights.shape[0]

    def __eq__(self, other):
        return (
            isinstance(other, DenseSpec)
            and self.activation == other.activation
            and np.array_equal(self.weights, other.weights)
            and np.array_equal(self.biases, other.biases)
        )


@dataclass(eq=False)
class DropoutSpec:
    rate: float

    kind = "dropout"

    def __eq__(self, other):
        return isinstance(other, DropoutSpec) and self.rate == other.rate


@dataclass(eq=False)
class BatchnormSpec:
    epsilon: float
    gamma: np.ndarray
    beta: np.ndarray
    moving_mean: np.ndarray
    moving_variance: np.ndarray

    kind = "batchnorm"

    @property
    def dim(self):
        return len(self.gamma)

    def __eq__(self, other):
        return (
            isinstance(other, BatchnormSpec)
            and self.epsilon == other.epsilon
            and np.array_equal(self.gamma, other.gamma)
            and np.array_equal(self.beta, other.beta)
            and np.array_equal(self.moving_mean, other.moving_mean)
            and np.array_equal(self.moving_variance, other.moving_variance)
        )


@dataclass(eq=False)
class ModelSpec:
    input_dim: int
    layers: list = field(default_factory=list)
    format_version: int = FORMAT_VERSION

    @property
    def output_dim(self):
        dim = self.input_dim
        for layer in self.layers:
            if layer.kind == "dense":
                dim = layer.output_dim
        return dim

    def __eq__(self, other):
        return (
            isinstance(other, ModelSpec)
            and self.format_version == other.format_version
            and self.input_dim == other.input_dim
            and self.layers == other.layers
        )


def format_float(v: float) -> str:
    """17-significant-digit decimal; round-trips any finite 64-bit value."""
    return "%.17g" % v


class _Tokens:
    """Token stream with per-token 1-based line numbers."""

    def __init__(self, text: str):
        self.items = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            body = line.split("#", 1)[0]
            for tok in body.split():
                self.items.append((tok, lineno))
        self.pos = 0
        self.last_line = max((ln for _, ln in self.items), default=1)

    def eof(self):
        return self.pos >= len(self.items)

    @property
    def remaining(self):
        return len(self.items) - self.pos

    def peek(self):
        return self.items[self.pos] if not self.eof() else (None, self.last_line)

    def next(self, what="token"):
        if self.eof():
            raise FormatSyntaxError(f"unexpected end of file, expected {what}",
                                    line=self.last_line)
        tok, line = self.items[self.pos]
        self.pos += 1
        return tok, line

    def expect(self, keyword):
        tok, line = self.next(f"keyword {keyword!r}")
        if tok != keyword:
            raise FormatSyntaxError(f"expected {keyword!r}, got {tok!r}", line=line)
        return line

    def next_int(self, what):
        tok, line = self.next(what)
        try:
            if "_" in tok:
                raise ValueError
            value = int(tok)
        except ValueError:
            raise FormatSyntaxError(f"expected integer {what}, got {tok!r}",
                                    line=line) from None
        return value, line

    def next_float(self, what):
        tok, line = self.next(what)
        try:
            if "_" in tok:
                raise ValueError
            value = float(tok)
        except ValueError:
            if tok in _KEYWORDS:
                raise DimensionMismatch(
                    f"expected {what}, got keyword {tok!r} (too few values)",
                    line=line) from None
            raise FormatSyntaxError(f"expected number {what}, got {tok!r}",
                                    line=line) from None
        if not math.isfinite(value):
            raise DomainError(f"non-finite value {tok!r} for {what}", line=line)
        return value, line

    def next_floats(self, count, what):
        # A declared count beyond the token supply can never be satisfied;
        # refuse before allocating (keeps fuzzed inputs cheap).
        if count > self.remaining:
            raise DimensionMismatch(
                f"expected {count} values for {what}, only {self.remaining} "
                f"tokens remain", line=self.peek()[1])
        # fast path: bulk-convert the slice; fall back to the per-token loop
        # (which knows line numbers) to diagnose any failure
        chunk = self.items[self.pos:self.pos + count]
        try:
            out = np.array([t for t, _ in chunk], dtype=np.float64)
        except ValueError:
            out = None
        if out is not None and np.all(np.isfinite(out)) \
                and not any("_" in t for t, _ in chunk):
            self.pos += count
            return out, chunk[-1][1]
        out = np.empty(count, dtype=np.float64)
        line = None
        for i in range(count):
            out[i], line = self.next_float(what)
        return out, line


def parse_model(data) -> ModelSpec:
    """Parse FKBX text (str or bytes) into a validated ModelSpec."""
    if isinstance(data, (bytes, bytearray)):
        text = bytes(data).decode("latin-1")
    else:
        text = data
    toks = _Tokens(text)

    tok, line = toks.peek()
    if tok != "FKBX":
        raise BadMagic(f"expected 'FKBX 1' header, got {tok!r}", line=line)
    toks.next()
    version, line = toks.next_int("format version")
    if version != FORMAT_VERSION:
        raise BadMagic(f"unsupported format version {version}", line=line)

    toks.expect("layers")
    n_layers, line = toks.next_int("layer count")
    if n_layers < 1:
        raise DomainError(f"layer count must be >= 1, got {n_layers}", line=line)
    toks.expect("input")
    input_dim, line = toks.next_int("input dimension")
    if input_dim < 1:
        raise DomainError(f"input dimension must be >= 1, got {input_dim}",
                          line=line)

    layers = []
    dim = input_dim
    for index in range(n_layers):
        kw, line = toks.next("layer keyword")
        if kw == "dense":
            layers.append(_parse_dense(toks, dim, line))
            dim = layers[-1].output_dim
        elif kw == "dropout":
            rate, rline = toks.next_float("dropout rate")
            if not 0.0 <= rate < 1.0:
                raise DomainError(f"dropout rate must be in [0, 1), got {rate}",
                                  line=rline)
            layers.append(DropoutSpec(rate=rate))
        elif kw == "batchnorm":
            layers.append(_parse_batchnorm(toks, dim))
        elif kw in _KEYWORDS:
            raise FormatSyntaxError(f"unexpected keyword {kw!r}", line=line)
        else:
            raise UnsupportedLayer(f"unknown layer kind {kw!r}", line=line)

    if not toks.eof():
        tok, line = toks.peek()
        raise FormatSyntaxError(f"trailing content after last layer: {tok!r}",
                                line=line)

    spec = ModelSpec(input_dim=input_dim, layers=layers)
    _check_softmax_placement(spec)
    return spec


def _parse_dense(toks, in_dim, header_line):
    out_dim, line = toks.next_int("dense output dimension")
    if out_dim < 1:
        raise DomainError(f"dense output dimension must be >= 1, got {out_dim}",
                          line=line)
    name, nline = toks.next("activation name")
    if name not in ACTIVATION_NAMES:
        raise FormatSyntaxError(f"unknown activation {name!r}", line=nline)
    alpha, aline = toks.next_float("leaky coefficient")
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"leaky coefficient must be in [0, 1], got {alpha}",
                          line=aline)
    toks.expect("b")
    biases, _ = toks.next_floats(out_dim, "bias value")
    if out_dim * in_dim > toks.remaining:
        raise DimensionMismatch(
            f"declared weight matrix {out_dim}x{in_dim} exceeds remaining "
            f"input", line=toks.peek()[1])
    weights = np.empty((out_dim, in_dim), dtype=np.float64)
    for row in range(out_dim):
        tok, wline = toks.peek()
        if tok != "W":
            raise DimensionMismatch(
                f"expected {out_dim} weight rows, got {row}", line=wline)
        toks.next()
        weights[row], _ = toks.next_floats(in_dim, "weight value")
    return DenseSpec(weights=weights, biases=biases,
                     activation=ActivationSpec(name, alpha))


def _parse_batchnorm(toks, dim):
    epsilon, eline = toks.next_float("batchnorm epsilon")
    if epsilon <= 0.0:
        raise DomainError(f"batchnorm epsilon must be > 0, got {epsilon}",
                          line=eline)
    vectors = {}
    for kw in ("gamma", "beta", "mean", "variance"):
        toks.expect(kw)
        vectors[kw], vline = toks.next_floats(dim, f"{kw} value")
    if np.any(vectors["variance"] < 0.0):
        raise DomainError("moving variance components must be >= 0", line=vline)
    return BatchnormSpec(epsilon=epsilon, gamma=vectors["gamma"],
                         beta=vectors["beta"], moving_mean=vectors["mean"],
                         moving_variance=vectors["variance"])


def _check_softmax_placement(spec):
    for i, layer in enumerate(spec.layers):
        if layer.kind == "dense" and layer.activation.name == "softmax":
            if i != len(spec.layers) - 1:
                raise DomainError(
                    f"softmax only permitted on the final layer (layer {i})")


def validate_spec(spec: ModelSpec):
    """Return a list of human-readable invariant violations (empty iff valid)."""
    violations = []
    if spec.format_version != FORMAT_VERSION:
        violations.append(f"format_version must be {FORMAT_VERSION}, "
                          f"got {spec.format_version}")
    if not isinstance(spec.input_dim, int) or spec.input_dim < 1:
        violations.append(f"input_dim must be a positive integer, "
                          f"got {spec.input_dim}")
        return violations
    if not spec.layers:
        violations.append("layers must be non-empty")
        return violations

    dim = spec.input_dim
    last = len(spec.layers) - 1
    for i, layer in enumerate(spec.layers):
        where = f"layer {i}"
        if layer.kind == "dense":
            w, b = np.asarray(layer.weights), np.asarray(layer.biases)
            if w.ndim != 2:
                violations.append(f"{where}: weights must be a matrix")
                continue
            if w.shape[1] != dim:
                violations.append(
                    f"{where}: DimensionMismatch: expects input {w.shape[1]}, "
                    f"previous layer provides {dim}")
            if b.shape != (w.shape[0],):
                violations.append(f"{where}: bias length {b.shape} does not "
                                  f"match output_dim {w.shape[0]}")
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                violations.append(f"{where}: non-finite parameter values")
            act = layer.activation
            if not 0.0 <= act.alpha <= 1.0:
                violations.append(f"{where}: DomainError: leaky coefficient "
                                  f"{act.alpha} outside [0, 1]")
            if act.name == "softmax" and i != last:
                violations.append(f"{where}: softmax only permitted on the "
                                  f"final layer")
            dim = w.shape[0]
        elif layer.kind == "dropout":
            if not 0.0 <= layer.rate < 1.0:
                violations.append(f"{where}: DomainError: dropout rate "
                                  f"{layer.rate} outside [0, 1)")
        elif layer.kind == "batchnorm":
            if layer.epsilon <= 0.0:
                violations.append(f"{where}: DomainError: epsilon "
                                  f"{layer.epsilon} must be > 0")
            for name in ("gamma", "beta", "moving_mean", "moving_variance"):
                vec = np.asarray(getattr(layer, name))
                if vec.shape != (dim,):
                    violations.append(f"{where}: DimensionMismatch: {name} "
                                      f"length {vec.shape[0] if vec.ndim else '?'}"
                                      f" != dim {dim}")
            if np.any(np.asarray(layer.moving_variance) < 0.0):
                violations.append(f"{where}: DomainError: moving variance has "
                                  f"negative components")
        else:
            violations.append(f"{where}: unknown layer kind {layer.kind!r}")
    return violations


def serialize_model(spec: ModelSpec) -> str:
    """Emit the canonical FKBX text for a valid spec."""
    violations = validate_spec(spec)
    if violations:
        raise InvalidSpec("; ".join(violations))

    lines = [f"FKBX {FORMAT_VERSION}",
             f"layers {len(spec.layers)}",
             f"input {spec.input_dim}"]
    for layer in spec.layers:
        if layer.kind == "dense":
            act = layer.activation
            lines.append(f"dense {layer.output_dim} {act.name} "
                         f"{format_float(act.alpha)}")
            lines.append("b " + " ".join(format_float(v) for v in layer.biases))
            for row in layer.weights:
                lines.append("W " + " ".join(format_float(v) for v in row))
        elif layer.kind == "dropout":
            lines.append(f"dropout {format_float(layer.rate)}")
        else:
            lines.append(f"batchnorm {format_float(layer.epsilon)}")
            for kw, vec in (("gamma", layer.gamma), ("beta", layer.beta),
                            ("mean", layer.moving_mean),
                            ("variance", layer.moving_variance)):
                lines.append(kw + " " + " ".join(format_float(v) for v in vec))
    return "\n".join(lines) + "\n"


def load_model_file(path) -> ModelSpec:
    with open(path, "rb") as fh:
        return parse_model(fh.read())


def save_model_file(spec: ModelSpec, path) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_model(spec))
