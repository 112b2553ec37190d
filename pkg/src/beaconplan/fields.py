"""Backend selection for the per-cell field kernels.

Prefers the compiled extension (``beaconplan._fieldcore``) and falls back
to the vectorized NumPy implementation when the extension is missing.
Set BEACONPLAN_PURE=1 to force the fallback (used by the parity tests and
the benchmark). Both backends implement identical semantics; results may
differ in the last ulp because summation order differs.
"""

from __future__ import annotations

import os

from . import _fieldpure

if os.environ.get("BEACONPLAN_PURE"):
    _impl = _fieldpure
    BACKEND = "pure"
else:
    try:
        from . import _fieldcore as _impl

        BACKEND = "native"
    except ImportError:
        _impl = _fieldpure
        BACKEND = "pure"

strength_field = _impl.strength_field
crlb_field = _impl.crlb_field
