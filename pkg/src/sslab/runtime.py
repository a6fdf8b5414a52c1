"""Runtime helpers shared by the numerical drivers.

Worker pools must produce bit-identical results regardless of how many
threads execute them, so the only thing threads are allowed to influence
is wall-clock time: work items are enumerated in a fixed order, mapped
with order-preserving scheduling, and reduced sequentially by the caller.
"""

from __future__ import annotations

import os
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

__all__ = ["resolve_thread_count", "ordered_map"]

_T = TypeVar("_T")
_R = TypeVar("_R")

THREADS_ENV_VAR = "SSLAB_THREADS"


def resolve_thread_count(threads: int | None = None) -> int:
    """Return the worker-thread count to use.

    Explicit argument wins, then the SSLAB_THREADS environment variable,
    then the machine parallelism. The result is always >= 1.
    """
    if threads is None:
        raw = os.environ.get(THREADS_ENV_VAR, "").strip()
        if raw:
            try:
                threads = int(raw)
            except ValueError:
                threads = 1
        else:
            threads = os.cpu_count() or 1
    return max(1, int(threads))


def ordered_map(func: Callable[[_T], _R], items: Sequence[_T],
                threads: int | None = None) -> list[_R]:
    """Map func over items, preserving input order in the result list.

    With one thread this is a plain loop; with more, a thread pool is
    used but results are still collected in submission order, so the
    output is independent of scheduling.
    """
    count = resolve_thread_count(threads)
    if count <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=count) as pool:
        return list(pool.map(func, items))
