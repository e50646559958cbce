"""Deterministic thread-pool mapping.

Tasks are independent and their results are collected in submission
order, so numeric outputs never depend on the worker count.  The
HYPERDUAL_THREADS environment variable caps the pool size.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List


def worker_count() -> int:
    env = os.environ.get("HYPERDUAL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


def parallel_map(fn: Callable, items: Iterable) -> List:
    items = list(items)
    workers = worker_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
