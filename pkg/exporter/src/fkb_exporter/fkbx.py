"""Reader/writer for the FKBX plain-text model format, bridge side.

The writer emits the canonical form (single spaces, one record per line,
floats at 17 significant digits), byte-compatible with what the native
runtime produces, so export after import is a fixed point on canonical files.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import FkbxParseError

FORMAT_VERSION = 1
ACTIVATIONS = ("linear", "relu", "leakyrelu", "sigmoid", "tanh", "softmax")


@dataclass
class DenseRecord:
    weights: np.ndarray  # [out x in]
    biases: np.ndarray
    activation: str
    alpha: float = 0.0
    kind: str = field(default="dense", init=False)

    @property
    def output_dim(self):
        return self.weights.shape[0]


@dataclass
class DropoutRecord:
    rate: float
    kind: str = field(default="dropout", init=False)


@dataclass
class BatchnormRecord:
    epsilon: float
    gamma: np.ndarray
    beta: np.ndarray
    moving_mean: np.ndarray
    moving_variance: np.ndarray
    kind: str = field(default="batchnorm", init=False)


@dataclass
class FkbxModel:
    input_dim: int
    layers: list


def format_float(v):
    return "%.17g" % v


def _vector_line(keyword, values):
    return keyword + " " + " ".join(format_float(v) for v in values)


def write_model(model: FkbxModel) -> str:
    lines = [f"FKBX {FORMAT_VERSION}",
             f"layers {len(model.layers)}",
             f"input {model.input_dim}"]
    dim = model.input_dim
    for rec in model.layers:
        if rec.kind == "dense":
            if rec.weights.shape[1] != dim:
                raise ValueError(f"dense expects input {rec.weights.shape[1]}, "
                                 f"chain provides {dim}")
            lines.append(f"dense {rec.output_dim} {rec.activation} "
                         f"{format_float(rec.alpha)}")
            lines.append(_vector_line("b", rec.biases))
            for row in rec.weights:
                lines.append(_vector_line("W", row))
            dim = rec.output_dim
        elif rec.kind == "dropout":
            lines.append(f"dropout {format_float(rec.rate)}")
        else:
            lines.append(f"batchnorm {format_float(rec.epsilon)}")
            lines.append(_vector_line("gamma", rec.gamma))
            lines.append(_vector_line("beta", rec.beta))
            lines.append(_vector_line("mean", rec.moving_mean))
            lines.append(_vector_line("variance", rec.moving_variance))
    return "\n".join(lines) + "\n"


class _Reader:
    """Whitespace-insensitive token stream with per-token line numbers;
    `#` starts a comment running to end of line."""

    def __init__(self, text):
        self.toks = []
        self.lines = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            for tok in line.split("#", 1)[0].split():
                self.toks.append(tok)
                self.lines.append(lineno)
        self.pos = 0
        self.last_line = self.lines[-1] if self.lines else 1

    def word(self, what):
        if self.pos >= len(self.toks):
            raise FkbxParseError(f"unexpected end of file, expected {what}",
                                 line=self.last_line)
        tok, line = self.toks[self.pos], self.lines[self.pos]
        self.pos += 1
        return tok, line

    def keyword(self, expected):
        tok, line = self.word(f"keyword {expected!r}")
        if tok != expected:
            raise FkbxParseError(f"expected {expected!r}, got {tok!r}",
                                 line=line)

    def integer(self, what):
        tok, line = self.word(what)
        try:
            return int(tok), line
        except ValueError:
            raise FkbxParseError(f"{what}: not an integer: {tok!r}",
                                 line=line) from None

    def floats(self, count, what):
        if self.pos + count > len(self.toks):
            raise FkbxParseError(
                f"{what}: expected {count} values, file ends after "
                f"{len(self.toks) - self.pos}", line=self.last_line)
        chunk = self.toks[self.pos:self.pos + count]
        try:
            out = np.array(chunk, dtype=np.float64)
            if not np.all(np.isfinite(out)):
                raise ValueError
        except ValueError:
            for offset, tok in enumerate(chunk):
                try:
                    v = float(tok)
                except ValueError:
                    v = np.inf
                if not np.isfinite(v) or "_" in tok:
                    raise FkbxParseError(
                        f"{what}: bad numeric value {tok!r}",
                        line=self.lines[self.pos + offset]) from None
        self.pos += count
        return out

    def floats1(self, what):
        return float(self.floats(1, what)[0])


def read_model(text: str) -> FkbxModel:
    r = _Reader(text)
    magic, line = r.word("magic")
    if magic != "FKBX":
        raise FkbxParseError(f"not an FKBX file (got {magic!r})", line=line)
    version, line = r.integer("format version")
    if version != FORMAT_VERSION:
        raise FkbxParseError(f"unsupported format version {version}", line=line)
    r.keyword("layers")
    n_layers, line = r.integer("layer count")
    if n_layers < 1:
        raise FkbxParseError(f"layer count must be >= 1, got {n_layers}",
                             line=line)
    r.keyword("input")
    dim, line = r.integer("input dimension")
    if dim < 1:
        raise FkbxParseError(f"input dimension must be >= 1, got {dim}",
                             line=line)

    model = FkbxModel(input_dim=dim, layers=[])
    for _ in range(n_layers):
        kw, line = r.word("layer keyword")
        if kw == "dense":
            out, oline = r.integer("dense output size")
            if out < 1:
                raise FkbxParseError(f"output size must be >= 1, got {out}",
                                     line=oline)
            act, aline = r.word("activation name")
            if act not in ACTIVATIONS:
                raise FkbxParseError(f"unknown activation {act!r}", line=aline)
            alpha = r.floats1("leaky coefficient")
            r.keyword("b")
            biases = r.floats(out, "biases")
            rows = []
            for _ in range(out):
                r.keyword("W")
                rows.append(r.floats(dim, "weight row"))
            model.layers.append(DenseRecord(weights=np.array(rows),
                                            biases=biases, activation=act,
                                            alpha=alpha))
            dim = out
        elif kw == "dropout":
            model.layers.append(DropoutRecord(rate=r.floats1("dropout rate")))
        elif kw == "batchnorm":
            eps = r.floats1("epsilon")
            vecs = {}
            for name in ("gamma", "beta", "mean", "variance"):
                r.keyword(name)
                vecs[name] = r.floats(dim, name)
            model.layers.append(BatchnormRecord(
                epsilon=eps, gamma=vecs["gamma"], beta=vecs["beta"],
                moving_mean=vecs["mean"], moving_variance=vecs["variance"]))
        else:
            raise FkbxParseError(f"unknown layer kind {kw!r}", line=line)

    if r.pos < len(r.toks):
        raise FkbxParseError(
            f"trailing content after last layer: {r.toks[r.pos]!r}",
            line=r.lines[r.pos])
    return model
