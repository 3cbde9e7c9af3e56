"""Selects the compiled kernels when built, else the numpy fallback.

Set ``HARDYOPS_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _accel_py

NAME = "python"
_impl = _accel_py

if not os.environ.get("HARDYOPS_PURE_PYTHON"):
    try:
        from . import _accel as _impl  # type: ignore[no-redef]

        NAME = "cython"
    except ImportError:
        _impl = _accel_py


def horner(coeffs, z):
    """Evaluate the polynomial ``sum coeffs[m] z**m`` at every point of ``z``."""
    import numpy as np

    c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    zz = np.asarray(z, dtype=np.complex128)
    flat = np.ascontiguousarray(zz.ravel())
    return np.asarray(_impl.horner(c, flat)).reshape(zz.shape)


def power_means(x, max_power):
    """Return ``[mean(x**j) for j in 0..max_power]`` for a real sample ``x``."""
    import numpy as np

    xx = np.ascontiguousarray(np.asarray(x, dtype=np.float64).ravel())
    return np.asarray(_impl.power_means(xx, int(max_power)))
