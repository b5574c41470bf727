"""Order-preserving process-parallel map; results never depend on the worker count."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(threads: int | None) -> int:
    if threads is None or threads <= 0:
        return os.cpu_count() or 1
    return threads


def pmap(func: Callable[[T], R], items: Iterable[T], threads: int | None = 1) -> list[R]:
    """``list(map(func, items))``, spread over ``threads`` processes when > 1."""
    items = list(items)
    threads = min(resolve_threads(threads), len(items))
    if threads <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(func, items))


def chunked(seq: list[T], parts: int) -> list[list[T]]:
    """Split into ``parts`` contiguous pieces (fixed by length only)."""
    parts = max(1, parts)
    size, extra = divmod(len(seq), parts)
    out, start = [], 0
    for i in range(parts):
        end = start + size + (1 if i < extra else 0)
        if end > start:
            out.append(seq[start:end])
        start = end
    return out
