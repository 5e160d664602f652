"""Exception hierarchy shared across the runtime."""


class FkbError(Exception):
    """Base class for all errors raised by this package."""


class ModelFormatError(FkbError):
    """Base class for FKBX parse/serialize errors; carries a 1-based line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class BadMagic(ModelFormatError):
    pass


class FormatSyntaxError(ModelFormatError):
    pass


class DimensionMismatch(ModelFormatError):
    pass


class DomainError(ModelFormatError):
    pass


class UnsupportedLayer(ModelFormatError):
    pass


class InvalidSpec(FkbError):
    pass


class NoCachedForward(FkbError):
    pass


class LossShapeMismatch(FkbError):
    pass


class DuplicateName(FkbError):
    pass


class UnknownLoss(FkbError):
    pass


class EmptyDirectory(FkbError):
    pass


class HeterogeneousDimensions(FkbError):
    pass


class EnsembleLoadError(FkbError):
    """Aggregates per-file parse failures; maps filename -> error."""

    def __init__(self, failures):
        self.failures = dict(failures)
        lines = "; ".join(f"{name}: {err}" for name, err in self.failures.items())
        super().__init__(f"failed to load ensemble members: {lines}")


class IoError(FkbError):
    pass


class RowWidthError(FkbError):
    def __init__(self, row, expected, actual):
        self.row = row
        super().__init__(f"row {row}: expected {expected} fields, got {actual}")


class NumericParseError(FkbError):
    def __init__(self, row, token):
        self.row = row
        super().__init__(f"row {row}: not a number: {token!r}")
