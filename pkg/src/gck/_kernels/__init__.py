"""Kernel backend selection: compiled Cython module when importable, pure
Python otherwise. GCK_KERNELS=python|compiled|auto forces the choice."""

import logging
import os

log = logging.getLogger(__name__)

_choice = os.environ.get("GCK_KERNELS", "auto").lower()
if _choice not in ("auto", "python", "compiled"):
    raise ValueError(f"GCK_KERNELS must be auto, python or compiled, not {_choice!r}")

if _choice == "python":
    from . import pure as _impl
    BACKEND = "python"
else:
    try:
        from . import _ckern as _impl
        BACKEND = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise
        from . import pure as _impl
        BACKEND = "python"
        log.info("compiled kernels unavailable, using pure-Python fallback")

closeness_stats = _impl.closeness_stats
brandes_partial = _impl.brandes_partial

__all__ = ["BACKEND", "closeness_stats", "brandes_partial"]
