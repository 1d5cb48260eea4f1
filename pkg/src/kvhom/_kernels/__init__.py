"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``KVH_PURE=1`` to force the fallback.
"""

import os

from . import _pykernels as pure

compiled = None
if os.environ.get("KVH_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled
    except ImportError:
        compiled = None

active = compiled if compiled is not None else pure
BACKEND = "cython" if compiled is not None else "python"

echelon_int = active.echelon_int
echelon_field = active.echelon_field
boundary_columns = active.boundary_columns

__all__ = ["echelon_int", "echelon_field", "boundary_columns",
           "BACKEND", "pure", "compiled"]
