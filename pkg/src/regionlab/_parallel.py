from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def n_workers() -> int:
    """Worker cap from ``REGIONLAB_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("REGIONLAB_THREADS", "1")))
    except ValueError:
        return 1


def pmap(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Ordered map; results never depend on the worker count."""
    items = list(items)
    workers = min(n_workers(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))
