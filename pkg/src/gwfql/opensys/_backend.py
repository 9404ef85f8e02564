"""Kernel selection.

The compiled extension is used when it imports; ``GWFQL_BACKEND=python``
forces the numpy fallback and ``GWFQL_BACKEND=compiled`` makes a missing
extension an error.
"""
import importlib
import os

from . import _kernels_py


def load(name: str):
    if name == "python":
        return _kernels_py
    if name == "compiled":
        return importlib.import_module("gwfql.opensys._kernels")
    raise ValueError(f"unknown backend {name!r}")


def available() -> list[str]:
    names = ["python"]
    try:
        load("compiled")
    except ImportError:
        pass
    else:
        names.insert(0, "compiled")
    return names


_requested = os.environ.get("GWFQL_BACKEND", "auto").lower()
if _requested == "auto":
    try:
        kernels = load("compiled")
        BACKEND = "compiled"
    except ImportError:
        kernels = _kernels_py
        BACKEND = "python"
else:
    kernels = load(_requested)
    BACKEND = _requested
