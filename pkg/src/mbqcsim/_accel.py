"""Backend selection for the hot numeric kernels.

The environment variable ``MBQCSIM_BACKEND`` picks the implementation:

* ``auto`` (default) - numba when importable, else pure numpy
* ``numba``          - require numba, fail loudly if missing
* ``numpy``          - force the pure-numpy path

``benchmarks/bench_backends.py`` compares the two paths; use
:func:`get_kernels` to obtain a specific one regardless of the flag.
"""

import os
import warnings

from . import _kernels_numpy

_ENV_VAR = "MBQCSIM_BACKEND"
_VALID = ("auto", "numba", "numpy")


def _load_numba_kernels():
    from . import _kernels_numba

    return _kernels_numba


def get_kernels(backend):
    """Return the kernel module for an explicit backend name."""
    if backend == "numpy":
        return _kernels_numpy
    if backend == "numba":
        return _load_numba_kernels()
    raise ValueError(f"unknown backend {backend!r}, expected 'numpy' or 'numba'")


def _resolve():
    requested = os.environ.get(_ENV_VAR, "auto").strip().lower()
    if requested not in _VALID:
        warnings.warn(
            f"{_ENV_VAR}={requested!r} not recognized, falling back to 'auto'",
            stacklevel=2,
        )
        requested = "auto"
    if requested == "numpy":
        return "numpy", _kernels_numpy
    if requested == "numba":
        return "numba", _load_numba_kernels()
    try:
        return "numba", _load_numba_kernels()
    except ImportError:
        return "numpy", _kernels_numpy


_BACKEND_NAME, _KERNELS = _resolve()

mle_ascent = _KERNELS.mle_ascent
chsh_pair_scan = _KERNELS.chsh_pair_scan
walk_tree = _KERNELS.walk_tree


def active_backend():
    """Name of the kernel backend in use ('numba' or 'numpy')."""
    return _BACKEND_NAME
