"""Best-split scan kernels with a compiled fast path.

The inner loop of every tree fit is a linear scan over sorted feature
values accumulating prefix sums.  A Cython build of that scan is used
when available; otherwise the vectorised numpy implementation is
selected at import time.  Both backends accumulate in the same order and
return bit-identical results, so trained models do not depend on which
one is active.  Set EXTRABENCH_PURE_PYTHON=1 to force the fallback.
"""

import os

from extrabench._kernels import _split_py

if os.environ.get("EXTRABENCH_PURE_PYTHON"):
    _impl = _split_py
    BACKEND = "python"
else:
    try:
        from extrabench._kernels import _split as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _split_py
        BACKEND = "python"

best_split_sse = _impl.best_split_sse
best_split_grad_hess = _impl.best_split_grad_hess

__all__ = ["BACKEND", "best_split_sse", "best_split_grad_hess"]
