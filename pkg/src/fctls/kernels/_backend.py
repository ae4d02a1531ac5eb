"""Backend selection for the numeric kernels.

The environment variable ``FCTLS_BACKEND`` picks how the kernels in
``fctls.kernels`` are executed:

* ``numba`` -- compile every kernel with ``numba.njit`` (the default when
  numba is importable).  Compiled code is cached on disk, so only the very
  first process pays the compilation cost.
* ``numpy`` -- run the identical source uncompiled, as plain NumPy.

Both paths execute the same function bodies; the flag only controls
compilation.  The choice is fixed at import time -- run the benchmark or the
cross-backend tests in subprocesses to compare the two.
"""

import os

from ..errors import ConfigurationError

_ENV_VAR = "FCTLS_BACKEND"
_CHOICES = ("numba", "numpy")


def _pick_backend() -> str:
    raw = os.environ.get(_ENV_VAR, "").strip().lower()
    if raw and raw not in _CHOICES:
        raise ConfigurationError(
            f"{_ENV_VAR}={raw!r} is not a valid backend; choose one of {_CHOICES}"
        )
    if raw == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if raw == "numba":
            raise ConfigurationError(
                f"{_ENV_VAR}=numba requested but numba is not installed"
            ) from None
        return "numpy"
    return "numba"


BACKEND = _pick_backend()

if BACKEND == "numba":
    from numba import njit

    def jit(func):
        return njit(cache=True)(func)

else:

    def jit(func):
        return func


def pure(func):
    """Return the uncompiled Python version of a kernel (itself if not jitted)."""
    return getattr(func, "py_func", func)
