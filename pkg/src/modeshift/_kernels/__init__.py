"""Kernel backend selection: compiled extension when available, else pure.

Override with MODESHIFT_KERNEL=pure|compiled. Requesting "compiled" without
the built extension is an import error rather than a silent fallback.
"""

from __future__ import annotations

import os

from . import pure

_requested = os.environ.get("MODESHIFT_KERNEL", "auto").lower()

_backend = pure
_backend_name = "pure"

if _requested in ("auto", "compiled"):
    try:
        from . import _cykern  # type: ignore[attr-defined]

        _backend = _cykern
        _backend_name = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise ImportError(
                "MODESHIFT_KERNEL=compiled but the extension is not built; "
                "run `python setup.py build_ext --inplace`"
            ) from None

bpr_travel_time = _backend.bpr_travel_time
bpr_travel_times = _backend.bpr_travel_times
logit_probabilities = _backend.logit_probabilities
logit_choice = _backend.logit_choice


def backend_name() -> str:
    return _backend_name
