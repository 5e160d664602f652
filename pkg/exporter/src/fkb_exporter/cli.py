"""fkb-export: move models between HDF5 archives and FKBX files.

Exit codes mirror the runtime CLI: 0 success, 1 domain error, 2 I/O error.
"""

import argparse
import sys

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fkb-export",
        description="Convert between Keras HDF5 archives and FKBX models")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("to-fkbx", help="export an HDF5 archive to FKBX")
    p.add_argument("h5")
    p.add_argument("fkbx")

    p = sub.add_parser("from-fkbx", help="rebuild an HDF5 archive from FKBX")
    p.add_argument("fkbx")
    p.add_argument("h5")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    # deferred so --help stays fast and framework-free
    from .bridge import export_to_fkbx, import_from_fkbx
    from .errors import BridgeError, IoError

    try:
        if args.command == "to-fkbx":
            report = export_to_fkbx(args.h5, args.fkbx)
        else:
            report = import_from_fkbx(args.fkbx, args.h5)
    except IoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except BridgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN

    for message in report.warnings:
        print(f"warning: {message}", file=sys.stderr)
    line = f"converted {report.layers_converted} layers"
    if report.skipped_attributes:
        line += " (skipped: " + ", ".join(report.skipped_attributes) + ")"
    print(line)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
