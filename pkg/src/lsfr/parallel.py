"""Row-band data parallelism shared by the per-cell raster operations."""

import os
from concurrent.futures import ThreadPoolExecutor

WORKERS_ENV = "LSFR_WORKERS"


def default_workers():
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def row_bands(n_rows, workers):
    """Split ``range(n_rows)`` into at most ``workers`` contiguous bands."""
    workers = max(1, min(int(workers), n_rows))
    edges = [n_rows * i // workers for i in range(workers + 1)]
    return [(a, b) for a, b in zip(edges, edges[1:]) if b > a]


def map_bands(fn, n_rows, workers=None):
    """Call ``fn(r0, r1)`` for each row band and return the results in row order.

    numpy releases the GIL for large array work, so threads give real overlap.
    Outputs never depend on the band layout.
    """
    workers = default_workers() if workers is None else workers
    bands = row_bands(n_rows, workers)
    if len(bands) == 1:
        return [fn(*bands[0])]
    with ThreadPoolExecutor(max_workers=len(bands)) as pool:
        return list(pool.map(lambda band: fn(*band), bands))
