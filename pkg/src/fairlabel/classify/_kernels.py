"""Select the histogram kernel backend at import time.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``FAIRLABEL_PURE_PYTHON`` is set to a non-empty value
other than ``0``, the numpy fallback is used.
"""

import importlib
import os

from . import _hist_py


def load_backend(name: str):
    """Return the kernel module for ``"cython"`` or ``"python"``."""
    if name == "python":
        return _hist_py
    if name == "cython":
        return importlib.import_module("fairlabel.classify._hist")
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


def _select():
    if os.environ.get("FAIRLABEL_PURE_PYTHON", "") not in ("", "0"):
        return "python", _hist_py
    try:
        return "cython", load_backend("cython")
    except ImportError:
        return "python", _hist_py


BACKEND, kernels = _select()
