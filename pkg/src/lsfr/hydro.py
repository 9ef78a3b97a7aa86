"""Stream extraction, exact Euclidean distance transform and drainage density."""

import numpy as np
from numba import njit

from .raster import CATEGORICAL, CATEGORICAL_NODATA, Grid, from_masked


def extract_streams(acc: Grid, threshold) -> Grid:
    """Binary stream mask: 1 where flow accumulation >= ``threshold``."""
    if not threshold > 0:
        raise ValueError(f"stream threshold must be positive, got {threshold}")
    valid = acc.valid
    mask = np.where(valid, (acc.values >= threshold).astype(np.int64), CATEGORICAL_NODATA)
    return Grid(acc.georef, mask, CATEGORICAL_NODATA, CATEGORICAL)


def as_mask(grid: Grid) -> np.ndarray:
    """True where a mask grid marks a feature (any non-zero data value)."""
    return grid.valid & (grid.values != 0)


@njit(cache=True)
def _lower_envelope(f, out, v, z):
    # Felzenszwalb & Huttenlocher 1-D squared distance transform.
    n = f.shape[0]
    k = -1
    for q in range(n):
        fq = f[q]
        if fq == np.inf:
            continue
        s = -np.inf
        while k >= 0:
            p = v[k]
            s = ((fq + q * q) - (f[p] + p * p)) / (2.0 * q - 2.0 * p)
            if s <= z[k]:
                k -= 1
            else:
                break
        k += 1
        v[k] = q
        z[k] = s if k > 0 else -np.inf
        z[k + 1] = np.inf
    if k < 0:
        out[:] = np.inf
        return
    j = 0
    for q in range(n):
        while z[j + 1] < q:
            j += 1
        d = q - v[j]
        out[q] = d * d + f[v[j]]


@njit(cache=True)
def _squared_edt(f):
    n, m = f.shape
    tmp = np.empty((n, m))
    out = np.empty((n, m))
    size = max(n, m)
    v = np.empty(size, dtype=np.int64)
    z = np.empty(size + 1)
    col = np.empty(n)
    res = np.empty(n)
    for c in range(m):
        for r in range(n):
            col[r] = f[r, c]
        _lower_envelope(col, res, v, z)
        for r in range(n):
            tmp[r, c] = res[r]
    row_out = np.empty(m)
    for r in range(n):
        _lower_envelope(tmp[r], row_out, v, z)
        out[r, :] = row_out
    return out


def euclidean_distance(sources: Grid) -> Grid:
    """Exact distance from each cell centre to the nearest source-cell centre.

    Two separable passes (columns, then rows) of the lower-envelope transform
    on squared distances in cell units, which stay exact integers.
    """
    src = as_mask(sources)
    if not src.any():
        raise ValueError("euclidean_distance needs at least one source cell")
    f = np.where(src, 0.0, np.inf)
    dist = np.sqrt(_squared_edt(f)) * sources.cell_size
    dist[~sources.valid] = np.nan
    return from_masked(_continuous_template(sources), dist)


def _continuous_template(g: Grid) -> Grid:
    return Grid(g.georef, np.zeros(g.shape))


def _box_sum(a, w):
    """Sum of ``a`` over the (2w+1)^2 window around each cell, truncated at edges."""
    n, m = a.shape
    c = np.zeros((n + 1, m + 1))
    c[1:, 1:] = a.cumsum(0).cumsum(1)
    r0 = np.clip(np.arange(n) - w, 0, n)
    r1 = np.clip(np.arange(n) + w + 1, 0, n)
    c0 = np.clip(np.arange(m) - w, 0, m)
    c1 = np.clip(np.arange(m) + w + 1, 0, m)
    return (c[r1][:, c1] - c[r0][:, c1] - c[r1][:, c0] + c[r0][:, c0])


def drainage_density(streams: Grid, radius) -> Grid:
    """Stream length per unit area inside a square window of half-width ``radius``.

    Each stream cell counts as ``cell_size`` of channel. The window area is the
    data-holding part of the window, so edge cells are not diluted by the
    outside of the grid. Units are map length / map area (metres give m/m^2;
    multiply by 1000 for km/km^2).
    """
    cs = streams.cell_size
    if radius < cs:
        raise ValueError(f"radius {radius} is smaller than the cell size {cs}")
    w = int(np.floor(radius / cs + 1e-9))
    valid = streams.valid
    length = _box_sum(as_mask(streams).astype(np.float64), w) * cs
    area = _box_sum(valid.astype(np.float64), w) * cs * cs
    with np.errstate(invalid="ignore", divide="ignore"):
        dens = length / area
    dens[~valid] = np.nan
    return from_masked(_continuous_template(streams), dens)
