"""Deterministic process-based fan-out.

Work is handed out as a plain ordered list and results come back in the
same order, so worker count changes wall time but never any output.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: int) -> list[R]:
    work = list(items)
    if threads <= 1 or len(work) <= 1:
        return [fn(item) for item in work]
    workers = min(threads, len(work))
    chunksize = max(1, math.ceil(len(work) / (4 * workers)))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, work, chunksize=chunksize))
