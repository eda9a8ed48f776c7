"""Pure-Python reference kernels, used when the compiled extension is unavailable."""

from __future__ import annotations

import numpy as np

DAY_US = 86_400_000_000


def score_grid(item_idx, base, captured_us, columns_us, n_sources, n_items, mu, lookback_days):
    n_cols = len(columns_us)
    out = [[0.0] * n_cols for _ in range(n_items)]
    item_idx = [int(i) for i in item_idx]
    base = [float(b) for b in base]
    captured_us = [int(c) for c in captured_us]
    for j in range(n_cols):
        ns = float(n_sources[j])
        if ns <= 0:
            continue
        t = int(columns_us[j])
        for k in range(len(base)):
            elapsed = t - captured_us[k]
            if elapsed < 0:
                continue
            days = elapsed // DAY_US
            if lookback_days >= 0 and days > lookback_days:
                continue
            out[item_idx[k]][j] += base[k] * (1.0 / (mu + days))
        for i in range(n_items):
            out[i][j] /= ns
    return np.array(out, dtype=np.float64).reshape(n_items, n_cols)
