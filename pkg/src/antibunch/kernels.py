"""Kernel backend selection.

The hot accumulation loops exist twice: a Cython extension (built at install
time) and a pure-numpy fallback with identical integer semantics.  The
compiled backend is preferred; set ANTIBUNCH_PURE_PYTHON=1 to force the
fallback.  ``benchmarks/bench_kernels.py`` compares the two.
"""

import os

if os.environ.get("ANTIBUNCH_PURE_PYTHON"):
    from . import _kernels_ref as _impl

    BACKEND = "numpy"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_ref as _impl

        BACKEND = "numpy"

pair_products = _impl.pair_products
triple_products = _impl.triple_products
pixel_sums = _impl.pixel_sums
