"""Hot loops behind the scorer.

The compiled extension is preferred; set ``TRENDREC_PURE_PYTHON=1`` or skip
building it to use the pure-Python fallback. ``BACKEND`` names the active one.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels

if os.environ.get("TRENDREC_PURE_PYTHON"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"


def score_grid(item_idx, base, captured_us, columns_us, n_sources, n_items, mu, lookback_days=None, backend=None):
    """Decayed, source-averaged score sums for every (item, column) cell.

    Match ``k`` adds ``base[k] / (mu + days)`` to ``out[item_idx[k], j]`` when
    captured at or before column ``j`` (and within ``lookback_days``); each
    column is then divided by its ``n_sources`` entry. Columns with no sources
    stay zero.
    """
    impl = {"python": _pykernels, "cython": _impl if BACKEND == "cython" else None}.get(backend or BACKEND)
    if impl is None:
        raise ImportError(f"kernel backend {backend!r} is not available")
    return impl.score_grid(
        np.ascontiguousarray(item_idx, dtype=np.int64),
        np.ascontiguousarray(base, dtype=np.float64),
        np.ascontiguousarray(captured_us, dtype=np.int64),
        np.ascontiguousarray(columns_us, dtype=np.int64),
        np.ascontiguousarray(n_sources, dtype=np.float64),
        int(n_items),
        float(mu),
        -1 if lookback_days is None else int(lookback_days),
    )


__all__ = ["BACKEND", "score_grid"]
