"""Kernel dispatch between numba-compiled loops and the pure-numpy fallback.

Set ``SYNTHRATINGS_DISABLE_NUMBA=1`` to force the numpy path (useful when
numba is unavailable or when debugging a kernel). ``SYNTHRATINGS_THREADS``
caps the numba thread pool.
"""

import os
import warnings

_FALSY = ("", "0", "false", "no", "off")

# numba probes an old system TBB on import of parallel kernels and warns; the
# omp/workqueue layers are used instead either way
warnings.filterwarnings("ignore", message="The TBB threading layer requires TBB")

try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda fn: fn

    prange = range


def numba_enabled():
    """True when kernels should run through numba."""
    flag = os.environ.get("SYNTHRATINGS_DISABLE_NUMBA", "").strip().lower()
    return HAVE_NUMBA and flag in _FALSY


def jit_opts():
    return dict(cache=True, nogil=True, error_model="numpy")


def apply_thread_limit():
    """Honour SYNTHRATINGS_THREADS for numba's parallel regions."""
    value = os.environ.get("SYNTHRATINGS_THREADS")
    if not value or not HAVE_NUMBA:
        return
    n = max(1, min(int(value), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)


def dispatch(numba_impl, numpy_impl):
    """Pick the implementation for the current environment at call time."""

    def call(*args, **kwargs):
        if numba_enabled():
            return numba_impl(*args, **kwargs)
        return numpy_impl(*args, **kwargs)

    call.numba_impl = numba_impl
    call.numpy_impl = numpy_impl
    call.__name__ = getattr(numpy_impl, "__name__", "kernel").replace("_numpy", "")
    call.__doc__ = numpy_impl.__doc__
    return call
