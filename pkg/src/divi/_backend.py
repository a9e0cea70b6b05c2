"""Kernel backend selection.

The compiled core (``divi._core``) is preferred when it was built; otherwise
the numpy kernels are used.  ``DIVI_BACKEND=python`` forces the fallback and
``DIVI_BACKEND=cython`` makes a missing extension a hard error, which is
useful in benchmarks comparing the two.
"""

import os

_requested = os.environ.get("DIVI_BACKEND", "auto").lower()

if _requested in ("auto", "cython", "compiled"):
    try:
        from . import _core as _impl
        BACKEND = "cython"
    except ImportError:
        if _requested != "auto":
            raise ImportError(
                "DIVI_BACKEND=cython but the compiled core is not built; "
                "reinstall with a C toolchain or set DIVI_BACKEND=python"
            )
        from . import _kernels_np as _impl
        BACKEND = "python"
elif _requested in ("python", "numpy"):
    from . import _kernels_np as _impl
    BACKEND = "python"
else:
    raise ValueError(f"unknown DIVI_BACKEND value {_requested!r}")

gated_loglik = _impl.gated_loglik
objective_grad_stats = _impl.objective_grad_stats
