"""Batch command-line front end.

Exit codes: 0 success, 1 domain/configuration error, 2 I/O error. Every
failure prints a single `error: ...` line to stderr; stdout carries data only.
"""

import argparse
import csv
import sys

import numpy as np

from . import losses
from .ensemble import load_ensemble
from .errors import FkbError, IoError
from .model_format import (
    format_float,
    load_model_file,
    save_model_file,
    validate_spec,
)
from .network import Network
from .training import TrainConfig, fit, load_csv

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2


def _read_rows(path, expected_width=None):
    """Read a numeric CSV as a float64 matrix; an initial non-numeric row is
    treated as a header."""
    try:
        with open(path, newline="") as fh:
            rows = [row for row in csv.reader(fh) if row]
    except OSError as exc:
        raise IoError(str(exc)) from exc
    out = []
    for rownum, row in enumerate(rows, start=1):
        try:
            values = [float(tok) for tok in row]
        except ValueError:
            if rownum == 1:
                continue  # header
            raise FkbError(f"{path}: row {rownum}: non-numeric field") from None
        if expected_width is not None and len(values) != expected_width:
            raise FkbError(f"{path}: row {rownum}: expected {expected_width} "
                           f"fields, got {len(values)}")
        out.append(values)
    if not out:
        raise FkbError(f"{path}: no data rows")
    return np.asarray(out, dtype=np.float64)


def _write_rows(path, rows):
    try:
        with open(path, "w", newline="") as fh:
            for row in rows:
                fh.write(",".join(format_float(v) for v in row) + "\n")
    except OSError as exc:
        raise IoError(str(exc)) from exc


def _load_model(path):
    try:
        return load_model_file(path)
    except OSError as exc:
        raise IoError(str(exc)) from exc


def cmd_validate(args):
    spec = _load_model(args.model)
    violations = validate_spec(spec)
    if violations:
        for v in violations:
            print(f"error: {v}", file=sys.stderr)
        return EXIT_DOMAIN
    print(f"OK {len(spec.layers)} {spec.input_dim} {spec.output_dim}")
    return EXIT_OK


def cmd_summary(args):
    spec = _load_model(args.model)
    net = Network.from_spec(spec)
    print(f"FKBX model: {len(spec.layers)} layers, "
          f"{spec.input_dim} -> {spec.output_dim}")
    print(f"{'idx':>3}  {'kind':<9} {'in':>5} {'out':>5}  details")
    for i, layer in enumerate(net.layers):
        if layer.kind == "dense":
            act = layer.activation
            details = act.name
            if act.name == "leakyrelu":
                details += f" alpha={format_float(act.alpha)}"
        elif layer.kind == "dropout":
            details = f"rate={format_float(layer.rate)}"
        else:
            details = f"epsilon={format_float(layer.epsilon)}"
        print(f"{i:>3}  {layer.kind:<9} {layer.input_dim:>5} "
              f"{layer.output_dim:>5}  {details}")
    return EXIT_OK


def cmd_predict(args):
    net = Network.from_spec(_load_model(args.model))
    inputs = _read_rows(args.input, expected_width=net.input_dim)
    _write_rows(args.output, (net.predict(x) for x in inputs))
    return EXIT_OK


def cmd_train(args):
    spec = _load_model(args.model)
    net = Network.from_spec(spec)
    cfg = TrainConfig(learning_rate=args.lr, epochs=args.epochs,
                      batch_size=args.batch, loss_name=args.loss,
                      seed=args.seed, shuffle=not args.no_shuffle)
    data = load_csv(args.data, net.input_dim, net.output_dim)
    history = fit(net, data, cfg)
    for i, value in enumerate(history):
        print(f"epoch {i} loss {format_float(value)}")
    net.set_mode("inference")
    try:
        save_model_file(net.to_spec(), args.out)
    except OSError as exc:
        raise IoError(str(exc)) from exc
    return EXIT_OK


def cmd_ensemble(args):
    ens = load_ensemble(args.dir, noise=args.noise, seed=args.seed)
    inputs = _read_rows(args.input, expected_width=ens.input_dim)
    _write_rows(args.output,
                (ens.predict(x, workers=args.workers) for x in inputs))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fkb", description="Neural-network runtime for FKBX models")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a model file")
    p.add_argument("model")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("summary", help="print the architecture table")
    p.add_argument("model")
    p.set_defaults(func=cmd_summary)

    p = sub.add_parser("predict", help="batch inference over a CSV")
    p.add_argument("model")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("train", help="gradient-descent training on a CSV")
    p.add_argument("model")
    p.add_argument("--data", required=True)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--epochs", type=int, default=1)
    p.add_argument("--batch", type=int, default=1)
    p.add_argument("--loss", default="mse",
                   help=f"one of {losses.registered_names()} or a registered "
                        f"custom loss")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-shuffle", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("ensemble", help="averaged ensemble prediction")
    p.add_argument("dir")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_ensemble)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except IoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (FkbError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
