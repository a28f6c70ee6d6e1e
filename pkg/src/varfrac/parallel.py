"""Deterministic fan-out helper for data-parallel evaluation."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor


def map_ordered(fn, items, threads: int = 1) -> list:
    """Map ``fn`` over ``items``, preserving order.

    With ``threads > 1`` the work runs on a thread pool; results are
    assembled in submission order, so the output (and any reduction over
    it) is identical to the sequential run.
    """
    items = list(items)
    if threads is None or threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
