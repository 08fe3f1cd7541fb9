"""Backend selection for the hot loops.

The compiled module ``ewlgame._kernels`` is used when it was built; otherwise
the numpy versions in ``ewlgame._kernels_py`` are used.  Setting the
environment variable ``EWLGAME_PURE_PYTHON=1`` forces the fallback.
"""
import os

import numpy as np

from . import _kernels_py

if os.environ.get("EWLGAME_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "cython"


def available_backends():
    """Names of the backends importable in this environment."""
    names = ["python"]
    try:
        from . import _kernels  # noqa: F401
    except ImportError:
        pass
    else:
        names.append("cython")
    return names


def _module(backend):
    if backend is None:
        return _impl
    if backend == "python":
        return _kernels_py
    if backend == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown backend {backend!r}")


def density_grid_max(matrix, corr, t_grid, s_grid, backend=None):
    """Maximum over ``t_grid`` of ``x.M.y + corr*sqrt(t(1-t)s(1-s))`` per ``s``.

    Parameters
    ----------
    matrix : sequence of 4 floats
        ``(m00, m01, m10, m11)``.
    corr : float
        Correlation coefficient multiplying the square-root term.
    t_grid, s_grid : 1-d arrays in [0, 1]

    Returns
    -------
    (ndarray, ndarray)
        Maximal values and the (first) maximizing index into ``t_grid``.
    """
    t = np.ascontiguousarray(t_grid, dtype=float)
    s = np.ascontiguousarray(s_grid, dtype=float)
    out_max = np.empty(s.shape[0])
    out_arg = np.empty(s.shape[0], dtype=np.int_)
    m00, m01, m10, m11 = (float(v) for v in matrix)
    _module(backend).density_grid_max(m00, m01, m10, m11, float(corr), t, s, out_max, out_arg)
    return out_max, out_arg


def statevector_payoffs(gamma, phases, matrix, x1, y1, backend=None):
    """Exact payoffs of both players for many density pairs.

    ``phases`` is ``(xi0, xi1, upsilon0, upsilon1)``; ``x1`` and ``y1`` are
    broadcast against each other and the results have the broadcast shape.
    """
    x1, y1 = np.broadcast_arrays(np.asarray(x1, dtype=float), np.asarray(y1, dtype=float))
    shape = x1.shape
    xf = np.ascontiguousarray(x1.ravel())
    yf = np.ascontiguousarray(y1.ravel())
    out1 = np.empty(xf.shape[0])
    out2 = np.empty(xf.shape[0])
    xi0, xi1, u0, u1 = (float(v) for v in phases)
    a00, a01, a10, a11 = (float(v) for v in matrix)
    _module(backend).statevector_payoffs(
        float(gamma), xi0, xi1, u0, u1, a00, a01, a10, a11, xf, yf, out1, out2
    )
    return out1.reshape(shape), out2.reshape(shape)
