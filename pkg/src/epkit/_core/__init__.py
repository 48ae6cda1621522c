"""Kernel backend selection.

The compiled extension is used when it imported cleanly; otherwise the
pure NumPy implementation takes over.  ``EPKIT_PURE=1`` in the environment
forces the fallback, which is handy for debugging and for the benchmark.
"""

import os

from . import pure

if os.environ.get("EPKIT_PURE"):
    _impl = pure
else:
    try:
        from . import _speedups as _impl
    except ImportError:
        _impl = pure

BACKEND = "compiled" if _impl is not pure else "pure"

determinant = _impl.determinant
solve = _impl.solve
char_poly = _impl.char_poly
polyval = _impl.polyval
poly_roots = _impl.poly_roots
rank = _impl.rank
null_space = _impl.null_space
null_vector = _impl.null_vector
RANK_RTOL = pure.RANK_RTOL


def backend_name():
    """Which kernel implementation is active: 'compiled' or 'pure'."""
    return BACKEND
