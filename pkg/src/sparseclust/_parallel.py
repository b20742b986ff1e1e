"""Deterministic worker-pool map.

Work items carry their own derived RNG seeds, so results are identical for
any worker count; the env var SCC_THREADS caps the pool size (1 disables
multiprocessing entirely).
"""

import os
from multiprocessing import get_context


def worker_count(n_tasks):
    cap = os.environ.get("SCC_THREADS", "")
    try:
        cap = int(cap) if cap else (os.cpu_count() or 1)
    except ValueError:
        cap = os.cpu_count() or 1
    return max(1, min(cap, n_tasks))


def pmap(fn, items, chunksize=1):
    """map(fn, items) preserving order, on a process pool when allowed."""
    items = list(items)
    workers = worker_count(len(items))
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    ctx = get_context("fork")
    with ctx.Pool(processes=workers) as pool:
        return pool.map(fn, items, chunksize=chunksize)
