"""Hot inner loops with a compiled backend and a numpy fallback.

The compiled module is used when it imports and ``DENSIMAT_PURE_PYTHON`` is
not set to ``1``. Both backends agree to rounding; see ``tests/test_kernels.py``
and ``benchmarks/bench_kernels.py``.
"""
import os

import numpy as np

from . import _fallback

_compiled = None
if os.environ.get("DENSIMAT_PURE_PYTHON") != "1":
    try:
        from . import _ckernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "numpy"


def _impl(use_compiled):
    if use_compiled is None:
        use_compiled = _compiled is not None
    if use_compiled and _compiled is None:
        raise RuntimeError("compiled kernels are not available")
    return _compiled if use_compiled else _fallback


def sandwich(left, x, right, *, use_compiled=None):
    """Stacked ``left @ x @ right`` over 4x4 blocks.

    ``left`` and ``right`` broadcast against ``x``; all trailing dims are (4, 4).
    """
    impl = _impl(use_compiled)
    x = np.asarray(x, dtype=np.complex128)
    if impl is _fallback:
        return _fallback.sandwich(left, x, right)
    shape = x.shape
    lb = np.broadcast_to(np.asarray(left, dtype=np.complex128), shape)
    rb = np.broadcast_to(np.asarray(right, dtype=np.complex128), shape)
    flat = lambda a: a.reshape(-1, 4, 4)
    return impl.sandwich(flat(lb), flat(x), flat(rb)).reshape(shape)


def wave_step(prev, cur, src, dt, spacing, *, use_compiled=None):
    """One leapfrog step of ``u_tt = lap(u) + src`` for stacked components.

    Arrays have shape (components, *spatial) with one or three periodic axes.
    """
    impl = _impl(use_compiled)
    args = [np.ascontiguousarray(a, dtype=np.float64) for a in (prev, cur, src)]
    if cur.ndim == 2:
        return impl.wave_step_1d(*args, float(dt), float(spacing[0]))
    if cur.ndim == 4:
        return impl.wave_step_3d(*args, float(dt), *(float(h) for h in spacing))
    raise ValueError(f"wave_step supports 1 or 3 spatial axes, got {cur.ndim - 1}")
