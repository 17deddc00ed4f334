"""Numeric kernels for the gamma-law isentropic gas model.

Two interchangeable implementations exist:

* ``pipetrack._kernels.compiled`` — Cython extension, built by setup.py
  when a C compiler is available (hot path for the front-tracking loop);
* ``pipetrack._kernels.reference`` — pure-Python mirror of the same
  algorithms, used automatically when the extension is missing.

Set ``PIPETRACK_PURE_PYTHON=1`` to force the reference implementation.
Both expose the same functions; ``benchmarks/bench_kernels.py`` compares
their throughput.
"""
import os

if os.environ.get("PIPETRACK_PURE_PYTHON"):
    from . import reference as impl
else:
    try:
        from . import compiled as impl  # type: ignore[attr-defined]
    except ImportError:
        from . import reference as impl

BACKEND = impl.BACKEND


def active_backend():
    """Name of the kernel implementation in use ('compiled' or 'python')."""
    return BACKEND
