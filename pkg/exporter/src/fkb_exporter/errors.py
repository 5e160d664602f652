class BridgeError(Exception):
    """Base class for conversion failures."""


class UnsupportedLayer(BridgeError):
    pass


class UnsupportedActivation(BridgeError):
    pass


class NonSequentialTopology(BridgeError):
    pass


class FkbxParseError(BridgeError):
    """FKBX syntax or domain error, carrying a 1-based line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class IoError(BridgeError):
    pass
