"""Deterministic parameter-grid parallelism.

Sweeps in this package are embarrassingly parallel over their grids; results
are merged in grid order so the output is identical for any thread count.
With threads <= 1 everything runs serially in-process (the default: the
reference environment is single-core, and most hot loops are vectorized).
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor


def parallel_map(fn, items, threads: int = 1):
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
