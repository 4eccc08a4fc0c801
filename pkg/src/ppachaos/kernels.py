"""Backend selection for the hot kernels.

The compiled ``_kernels`` extension is used when importable; otherwise the
numpy fallback. Setting the environment variable ``PPACHAOS_PURE=1`` forces
the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("PPACHAOS_PURE", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

hermite_table = _impl.hermite_table
design_matrix = _impl.design_matrix
gradient_matrix = _impl.gradient_matrix
kde_sum = _impl.kde_sum

__all__ = ["BACKEND", "hermite_table", "design_matrix", "gradient_matrix", "kde_sum"]
