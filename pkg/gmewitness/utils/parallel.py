"""Order-preserving parallel map over independent work items."""

from __future__ import annotations

import os
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from gmewitness.settings import app_settings

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(workers: int | None = None) -> int:
    """Return the worker count: explicit value, ``WITNESS_WORKERS``, or CPU count."""
    if workers is not None:
        if workers < 1:
            raise ValueError("workers must be at least 1")
        return workers
    if app_settings.runtime.workers is not None:
        return app_settings.runtime.workers
    return max(1, os.cpu_count() or 1)


def parallel_map(
    fn: Callable[[T], R], items: Iterable[T], workers: int | None = None
) -> list[R]:
    """Apply ``fn`` to every item; results come back in input order.

    numpy releases the GIL inside the linear algebra that dominates every
    work item here, so threads are enough.
    """
    items = list(items)
    n_workers = min(resolve_workers(workers), len(items))
    if n_workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(fn, items))
