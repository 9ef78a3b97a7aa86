import numpy as np
import pytest

from lsfr.raster import CATEGORICAL, GeoRef, Grid


def surface(fn, n=7, m=7, cell_size=1.0, x0=0.0, y0=0.0):
    """Grid of ``fn(x, y)`` sampled at cell centres; y is northing, row 0 north."""
    r, c = np.indices((n, m), dtype=np.float64)
    x = x0 + (c + 0.5) * cell_size
    y = y0 + (n - r - 0.5) * cell_size
    return Grid(GeoRef(x0, y0, cell_size, n, m), fn(x, y))


def mask_grid(arr, cell_size=1.0):
    arr = np.asarray(arr, dtype=np.int64)
    return Grid(GeoRef(0.0, 0.0, cell_size, *arr.shape), arr, kind=CATEGORICAL)


def grid(arr, cell_size=1.0, kind="continuous", nodata=-9999.0):
    arr = np.asarray(arr)
    if arr.ndim == 1:
        arr = arr[None, :]
    return Grid(GeoRef(0.0, 0.0, cell_size, *arr.shape), arr, nodata, kind)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
