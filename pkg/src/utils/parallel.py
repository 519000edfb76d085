"""Ordered parallel map for grid sweeps and Monte Carlo chunks.

QFI_LAB_THREADS caps the worker count (default: all cores). Results always
come back in input order, so nothing downstream depends on scheduling or on
how many workers ran.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

from src.utils.logging import log, get_logger

MODULE = "parallel"
logger = get_logger()

T = TypeVar("T")
R = TypeVar("R")


def worker_count() -> int:
    """Worker cap from QFI_LAB_THREADS, read at call time."""
    raw = os.getenv("QFI_LAB_THREADS")
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError:
        log.warning(logger, MODULE, "threads_fallback",
                    "QFI_LAB_THREADS is not an integer, using 1 worker",
                    value=raw)
        return 1
    if value < 1:
        log.warning(logger, MODULE, "threads_fallback",
                    "QFI_LAB_THREADS below 1, using 1 worker", value=value)
        return 1
    return value


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Apply ``fn`` to every item, returning results in input order."""
    items = list(items)
    workers = min(worker_count(), max(len(items), 1))
    if workers <= 1:
        return [fn(item) for item in items]

    log.debug(logger, MODULE, "map_start", "Parallel map",
              items=len(items), workers=workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
