"""Episode engine selection.

The compiled Cython kernel is preferred when its extension module built;
otherwise the pure-Python twin takes over.  Set FBANDIT_ENGINE=pure (or
compiled) to force a choice; forcing `compiled` without the extension raises
at import of this module's `active_kernel`.
"""

from __future__ import annotations

import os

from . import pure

try:
    from . import _kernel as _compiled
except ImportError:  # extension not built; pure fallback
    _compiled = None

_FORCED = os.environ.get("FBANDIT_ENGINE")


def compiled_available() -> bool:
    return _compiled is not None


def get_kernel(engine: str = "auto"):
    """Resolve an engine name to (module, canonical_name).

    engine: "auto", "compiled", or "pure".
    """
    choice = engine
    if choice == "auto" and _FORCED in ("pure", "compiled"):
        choice = _FORCED
    if choice == "auto":
        return (_compiled, "compiled") if _compiled is not None else (pure, "pure")
    if choice == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled engine requested but the extension is not built")
        return _compiled, "compiled"
    if choice == "pure":
        return pure, "pure"
    raise ValueError(f"unknown engine {choice!r}")


def active_engine_name() -> str:
    return get_kernel("auto")[1]
