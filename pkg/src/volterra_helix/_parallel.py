import os
from concurrent.futures import ThreadPoolExecutor

THREADS_ENV = "VOLTERRA_HELIX_THREADS"


def worker_count() -> int:
    """Worker count from ``VOLTERRA_HELIX_THREADS``; 0 or unset means one per CPU."""
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def ordered_map(fn, items):
    """``list(map(fn, items))``, threaded when more than one worker is configured."""
    items = list(items)
    n = min(worker_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
