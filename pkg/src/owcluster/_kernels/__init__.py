"""Kernel backend selection.

The compiled extension is used when it imported cleanly; otherwise the
pure-Python fallback takes over. Set OWCLUSTER_BACKEND=python to force the
fallback (used by the benchmark and the backend-parity tests).
"""

from __future__ import annotations

import os

from . import fallback as _fallback

_compiled = None
if os.environ.get("OWCLUSTER_BACKEND", "").lower() != "python":
    try:
        from . import _core as _compiled  # type: ignore[no-redef]
    except ImportError:
        _compiled = None

_impl = _compiled if _compiled is not None else _fallback


def backend_name() -> str:
    return "compiled" if _impl is _compiled and _compiled is not None else "python"


def get_backend(name: str):
    """Return a specific backend module ("compiled" or "python"), or None."""
    if name == "compiled":
        return _compiled
    if name == "python":
        return _fallback
    raise ValueError(f"unknown backend {name!r}")


dijkstra_apsp = _impl.dijkstra_apsp
tsne_kl_grad = _impl.tsne_kl_grad
umap_layout = _impl.umap_layout
fasterpam_swap = _impl.fasterpam_swap
fastermsc_swap = _impl.fastermsc_swap
