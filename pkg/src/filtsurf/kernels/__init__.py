"""Kernel backend selection.

The compiled extension (`_core`, built from ``_core.pyx``) is preferred;
if it is unavailable the pure-Python twin in ``pure.py`` is used.  Both
produce bit-identical results, so the choice affects speed only.  Set
``FILTSURF_PURE=1`` to force the pure backend (used by the kernel
benchmark and the equivalence tests).
"""

import os

from . import pure

if os.environ.get("FILTSURF_PURE"):
    _impl = pure
    BACKEND = "pure"
else:
    try:
        from . import _core as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = pure
        BACKEND = "pure"

component_counts = _impl.component_counts
label_histograms = _impl.label_histograms
best_split = _impl.best_split

__all__ = ["BACKEND", "best_split", "component_counts", "label_histograms", "pure"]
