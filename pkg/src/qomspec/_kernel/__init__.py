"""Integrator backend selection.

The compiled extension is preferred; the pure-Python kernel implements
the identical algorithm and is used when the extension was not built.
``QOMSPEC_FORCE_PYTHON_KERNEL=1`` forces the fallback (useful for
debugging and for the kernel benchmark).
"""

import os

from . import _pykernel

try:
    from . import _core
except ImportError:  # extension not built on this platform
    _core = None

STATUS_OK = _pykernel.STATUS_OK
STATUS_STEP_UNDERFLOW = _pykernel.STATUS_STEP_UNDERFLOW
STATUS_DIVERGED = _pykernel.STATUS_DIVERGED

_FORCED = os.environ.get("QOMSPEC_FORCE_PYTHON_KERNEL") == "1"


def available_backends() -> tuple:
    """Names of the kernels importable in this environment."""
    return ("compiled", "python") if _core is not None else ("python",)


def default_backend() -> str:
    if _core is not None and not _FORCED:
        return "compiled"
    return "python"


def get_kernel(backend: str | None = None):
    """Return the kernel module for ``backend`` (None = best available)."""
    if backend is None:
        backend = default_backend()
    if backend == "compiled":
        if _core is None:
            raise RuntimeError("compiled kernel is not available in this build")
        return _core
    if backend == "python":
        return _pykernel
    raise ValueError(f"unknown backend {backend!r}; expected 'compiled' or 'python'")
