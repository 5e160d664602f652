"""Bridge between Keras HDF5 model archives and the FKBX text format."""

from .errors import (
    BridgeError,
    FkbxParseError,
    IoError,
    NonSequentialTopology,
    UnsupportedActivation,
    UnsupportedLayer,
)

__version__ = "0.1.0"

__all__ = [
    "BridgeError",
    "ExportReport",
    "FkbxParseError",
    "IoError",
    "NonSequentialTopology",
    "UnsupportedActivation",
    "UnsupportedLayer",
    "export_to_fkbx",
    "import_from_fkbx",
]


def __getattr__(name):
    # bridge pulls in the full framework stack; load it on first use only
    if name in ("export_to_fkbx", "import_from_fkbx", "ExportReport"):
        from . import bridge
        return getattr(bridge, name)
    raise AttributeError(name)
