"""Selects the integration kernel at import: the compiled extension when
present, the pure-Python twin otherwise.  Set WIRETAIL_KERNEL=python to
force the fallback (useful for timing and equivalence checks)."""

from __future__ import annotations

import os

from . import _kernel_py as python_kernel

kernel = python_kernel
if os.environ.get("WIRETAIL_KERNEL", "").lower() != "python":
    try:
        from . import _kernel as kernel  # type: ignore[attr-defined, no-redef]
    except ImportError:  # extension not built on this install
        pass


def backend_name() -> str:
    """Name of the active integration kernel: 'compiled' or 'python'."""
    return kernel.BACKEND


def available_kernels() -> dict[str, object]:
    """All importable kernel modules keyed by backend name, regardless of
    which one is active."""
    kernels: dict[str, object] = {python_kernel.BACKEND: python_kernel}
    try:
        from . import _kernel  # type: ignore[attr-defined]
        kernels[_kernel.BACKEND] = _kernel
    except ImportError:
        pass
    return kernels
