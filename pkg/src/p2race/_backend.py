"""Select the kernel implementation at import.

The compiled module is used when present; ``P2RACE_BACKEND=python`` forces
the fallback (handy for benchmarks and for checking the two agree).
"""

import os

from . import _fallback

fallback = _fallback

if os.environ.get("P2RACE_BACKEND", "").lower() == "python":
    kernels = _fallback
else:
    try:
        from . import _kernels as kernels
    except ImportError:
        kernels = _fallback

compiled = None if kernels is _fallback else kernels
if compiled is None:
    try:
        from . import _kernels as compiled
    except ImportError:
        pass

BACKEND = kernels.NAME
