"""Kernel backend selection.

The brute-force game oracle spends essentially all of its time evaluating
segment payoffs over rate grids. Two interchangeable implementations exist:

* ``gmtcomp._kernels_numba`` — scalar loops under ``numba.njit`` (default)
* ``gmtcomp._kernels_numpy`` — vectorized pure numpy

Set ``GMTCOMP_BACKEND=numpy`` to force the numpy path (e.g. when numba is
unavailable or JIT warm-up is unwanted); ``GMTCOMP_BACKEND=numba`` makes a
numba import failure fatal instead of falling back. ``benchmarks/bench_backends.py``
compares the two.
"""

import os

_choice = os.environ.get("GMTCOMP_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"GMTCOMP_BACKEND must be 'auto', 'numba' or 'numpy', got {_choice!r}"
    )

if _choice == "numpy":
    from . import _kernels_numpy as kernels
    BACKEND = "numpy"
else:
    try:
        from . import _kernels_numba as kernels
        BACKEND = "numba"
    except ImportError:
        if _choice == "numba":
            raise
        from . import _kernels_numpy as kernels
        BACKEND = "numpy"

nonhaven_segment_values = kernels.nonhaven_segment_values
haven_segment_values = kernels.haven_segment_values
