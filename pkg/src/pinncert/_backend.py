"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
fallback. Setting ``PINNCERT_BACKEND=python`` forces the fallback.
"""

import os

from . import _kernels_py

kernels = _kernels_py
NAME = "python"

if os.environ.get("PINNCERT_BACKEND", "").lower() != "python":
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        kernels = _compiled
        NAME = "cython"
