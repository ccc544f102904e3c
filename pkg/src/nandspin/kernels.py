"""Backend selection for the hot loops.

The compiled extension is preferred. Setting ``NANDSPIN_PURE_PYTHON=1`` (or a
missing build) falls back to the pure-Python twin with identical semantics.
"""
from __future__ import annotations

import importlib
import os
from contextlib import contextmanager
from types import ModuleType

from nandspin import _pykernel


def load_backend(name: str) -> ModuleType:
    """Return the kernel module for ``"cython"`` or ``"python"``."""
    if name == "python":
        return _pykernel
    if name == "cython":
        return importlib.import_module("nandspin._kernel")
    raise ValueError(f"unknown kernel backend {name!r}")


def available_backends() -> list[str]:
    names = ["python"]
    try:
        load_backend("cython")
    except ImportError:
        pass
    else:
        names.insert(0, "cython")
    return names


if os.environ.get("NANDSPIN_PURE_PYTHON", "") not in ("", "0"):
    BACKEND = "python"
else:
    BACKEND = available_backends()[0]

_ENTRY_POINTS = ("llg_rhs", "llg_integrate", "transient", "dc_operating_point")


def _install(name: str) -> None:
    global BACKEND
    impl = load_backend(name)
    for fn in _ENTRY_POINTS:
        globals()[fn] = getattr(impl, fn)
    BACKEND = name


@contextmanager
def use_backend(name: str):
    """Temporarily route every kernel call through ``name`` (tests and benchmarks)."""
    previous = BACKEND
    _install(name)
    try:
        yield load_backend(name)
    finally:
        _install(previous)


_install(BACKEND)
