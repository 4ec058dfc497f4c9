"""Backend selection for the half-sweep kernel.

The compiled extension is used when it imports; set ``FDIVOT_PURE_PYTHON=1``
to force the numpy fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
half_sweep = _pykernels.half_sweep

if os.environ.get("FDIVOT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        half_sweep = _ckernels.half_sweep
        BACKEND = "cython"

python_half_sweep = _pykernels.half_sweep


def compiled_half_sweep():
    """Return the compiled kernel, or ``None`` when the extension is not built."""
    try:
        from . import _ckernels
    except ImportError:
        return None
    return _ckernels.half_sweep
