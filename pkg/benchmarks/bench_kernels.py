"""Compare the compiled and pure-Python score-grid kernels.

    python benchmarks/bench_kernels.py [--items 4000] [--matches 20000] [--columns 14]

Defaults approximate the catalogue size of a small marketplace crawl: a few
thousand items scored at a couple of weeks of daily trend batches.
"""

from __future__ import annotations

import argparse
import random
import time

import numpy as np

from trendrec import _kernels

DAY_US = 86_400_000_000


def make_inputs(n_items: int, n_matches: int, n_cols: int, seed: int = 0):
    rng = random.Random(seed)
    cols = [d * DAY_US for d in range(n_cols)]
    return (
        np.array([rng.randrange(n_items) for _ in range(n_matches)], dtype=np.int64),
        np.array([rng.uniform(-1, 20) for _ in range(n_matches)]),
        np.array([rng.randrange(0, n_cols * DAY_US) for _ in range(n_matches)], dtype=np.int64),
        np.array(cols, dtype=np.int64),
        np.ones(n_cols),
        n_items,
        0.1,
    )


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--items", type=int, default=4000)
    parser.add_argument("--matches", type=int, default=20000)
    parser.add_argument("--columns", type=int, default=14)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    inputs = make_inputs(args.items, args.matches, args.columns)
    print(f"items={args.items} matches={args.matches} columns={args.columns} active={_kernels.BACKEND}")
    py = best_of(lambda: _kernels.score_grid(*inputs, backend="python"), args.repeat)
    print(f"python  {py * 1e3:10.2f} ms")
    if _kernels.BACKEND != "cython":
        print("cython  (extension not built)")
        return
    cy = best_of(lambda: _kernels.score_grid(*inputs, backend="cython"), args.repeat)
    print(f"cython  {cy * 1e3:10.2f} ms   speedup x{py / cy:.1f}")
    a = _kernels.score_grid(*inputs, backend="python")
    b = _kernels.score_grid(*inputs, backend="cython")
    print(f"max abs difference {np.max(np.abs(a - b)):.3e}")


if __name__ == "__main__":
    main()
