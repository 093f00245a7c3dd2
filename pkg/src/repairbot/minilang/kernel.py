"""Interpreter kernel selection.

Prefers the compiled extension (``repairbot.minilang._kernel``) when it was
built, falling back to the pure-Python twin. Set ``REPAIRBOT_PURE_PY=1`` to
force the fallback, e.g. for benchmarking or debugging.
"""

from __future__ import annotations

import os

from . import _kernel_py

_FORCE_PURE = os.environ.get("REPAIRBOT_PURE_PY", "") not in ("", "0")

if not _FORCE_PURE:
    try:
        from . import _kernel as _active  # type: ignore[attr-defined]
    except ImportError:
        _active = _kernel_py
else:
    _active = _kernel_py


def active_kernel():
    return _active


def kernel_name() -> str:
    return _active.KERNEL_NAME


def available_kernels():
    """All importable kernels, for equivalence tests and benchmarks."""
    kernels = {"pure-python": _kernel_py}
    try:
        from . import _kernel  # type: ignore[attr-defined]
        kernels[_kernel.KERNEL_NAME] = _kernel
    except ImportError:
        pass
    return kernels
