"""Optional process-level parallelism, capped by EONSPECTRA_THREADS.

Work items must be pure functions of picklable arguments; results are
returned in submission order, so callers stay deterministic regardless of
scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor


def thread_count() -> int:
    raw = os.environ.get("EONSPECTRA_THREADS", "1")
    try:
        count = int(raw)
    except ValueError:
        return 1
    return max(1, count)


def parallel_map(fn, items: list) -> list:
    """Map ``fn`` over ``items``, in processes when the cap allows."""
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
