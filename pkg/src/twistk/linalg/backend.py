"""Select the modular elimination kernel: compiled when available, numpy otherwise.

Set ``TWISTK_PURE=1`` to force the numpy implementation.
"""
import os

from . import _rref_py

python_rref_mod_p = _rref_py.rref_mod_p
compiled_rref_mod_p = None

if not os.environ.get("TWISTK_PURE"):
    try:
        from ._rref_ext import rref_mod_p as compiled_rref_mod_p
    except ImportError:  # extension not built
        compiled_rref_mod_p = None

rref_mod_p = compiled_rref_mod_p or python_rref_mod_p
BACKEND = "compiled" if compiled_rref_mod_p is not None else "python"
