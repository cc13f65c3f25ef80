"""Backend selection: compiled extension if available, else pure Python.

Set ``LAMPWALK_PURE=1`` to force the pure-Python kernels.
"""

import os

if os.environ.get("LAMPWALK_PURE") == "1":
    from . import _core_py as _impl

    BACKEND = "pure"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _core_py as _impl

        BACKEND = "pure"

path_sum_float = _impl.path_sum_float
lamp_apply = _impl.lamp_apply
