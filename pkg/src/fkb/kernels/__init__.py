"""Kernel backend selection.

The compiled extension (fkb._core) is used when available; setting the
environment variable FKB_PURE_PYTHON=1 forces the numpy fallback. Both
backends expose the same functions and activation-kind constants.
"""

import os

from . import pure

if os.environ.get("FKB_PURE_PYTHON"):
    _impl = pure
    BACKEND = "python"
else:
    try:
        from fkb import _core as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = pure
        BACKEND = "python"

ACT_LINEAR = pure.ACT_LINEAR
ACT_RELU = pure.ACT_RELU
ACT_LEAKYRELU = pure.ACT_LEAKYRELU
ACT_SIGMOID = pure.ACT_SIGMOID
ACT_TANH = pure.ACT_TANH
ACT_SOFTMAX = pure.ACT_SOFTMAX

affine = _impl.affine
affine_grads = _impl.affine_grads
act_apply = _impl.act_apply
act_deriv = _impl.act_deriv
softmax = _impl.softmax
