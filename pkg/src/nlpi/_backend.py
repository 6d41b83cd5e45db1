"""Pick the integrator kernel at import time.

The compiled ``_kernel`` is used when it was built; set ``NLPI_PURE_PYTHON=1``
to force the fallback (the benchmark and the parity tests do this
explicitly through ``load``).
"""

from __future__ import annotations

import os

from . import _pykernel


def load(prefer_compiled: bool = True):
    if prefer_compiled:
        try:
            from . import _kernel
        except ImportError:
            pass
        else:
            return _kernel.integrate, "compiled"
    return _pykernel.integrate, "python"


integrate, BACKEND = load(not os.environ.get("NLPI_PURE_PYTHON"))
integrate_callables = _pykernel.integrate_callables
