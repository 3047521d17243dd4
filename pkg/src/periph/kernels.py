"""Kernel selection: compiled extension when available, numpy fallback otherwise.

Set ``PERIPH_PURE=1`` to force the fallback.  ``BACKEND`` names the active one.
"""
import os

from . import _kernels_py

if os.environ.get("PERIPH_PURE", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py
        BACKEND = "python"

word_product = _impl.word_product
lattice_min = _impl.lattice_min
commuting_words = _impl.commuting_words
