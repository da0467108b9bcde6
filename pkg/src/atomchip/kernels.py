"""Backend selection for the numerical kernels.

The compiled extension is used when it was built; otherwise the numpy
fallback is imported.  Set ``ATOMCHIP_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

if os.environ.get("ATOMCHIP_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"

geometry_tensor = _impl.geometry_tensor
transverse_field = _impl.transverse_field

__all__ = ["BACKEND", "geometry_tensor", "transverse_field"]
