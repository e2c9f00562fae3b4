"""Backend selection for the hot loops.

The compiled extension is used when it was built; otherwise, or when
``TSTSIM_PURE_PYTHON`` is set to a non-empty value, the pure-Python versions
are used. Both produce identical results.
"""

import os

if os.environ.get("TSTSIM_PURE_PYTHON"):
    from ._kernels_py import greedy_align, lcs_length

    BACKEND = "python"
else:
    try:
        from ._kernels import greedy_align, lcs_length

        BACKEND = "cython"
    except ImportError:
        from ._kernels_py import greedy_align, lcs_length

        BACKEND = "python"

__all__ = ["BACKEND", "greedy_align", "lcs_length"]
