"""Terrain derivatives: slope, aspect, curvature, D8 routing, SPI/TWI, NDVI, cut-fill.

All 3x3 operators replicate edge cells so outputs keep the full extent, and a
nodata anywhere in the 3x3 window makes the output cell nodata.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
from numba import njit

from .parallel import map_bands
from .raster import (CATEGORICAL, CATEGORICAL_NODATA, CONTINUOUS, DEFAULT_NODATA,
                     Grid, align_check, from_masked)

FLAT_ASPECT = -1.0
FLAT_GRADIENT = 1e-8
MIN_TAN_SLOPE = 1e-6

# D8 codes in tie-break order: (code, d_row, d_col)
D8 = (
    (1, 0, 1),     # E
    (2, 1, 1),     # SE
    (4, 1, 0),     # S
    (8, 1, -1),    # SW
    (16, 0, -1),   # W
    (32, -1, -1),  # NW
    (64, -1, 0),   # N
    (128, -1, 1),  # NE
)
NO_OUTFLOW = 0

CUT_FILL_GAIN = 1
CUT_FILL_UNCHANGED = 0
CUT_FILL_LOSS = 2


def _window_op(dem: Grid, kernel, workers=None):
    """Apply ``kernel(window, cell_size)`` over row bands of the edge-padded DEM."""
    z = np.pad(dem.masked(np.nan), 1, mode="edge")
    cs = dem.cell_size

    def band(r0, r1):
        return kernel(z[r0:r1 + 2], cs)

    out = np.vstack(map_bands(band, dem.shape[0], workers))
    out[~dem.valid] = np.nan
    return out


def _neighbours(w):
    # a b c / d e f / g h i, row 0 of the window is north
    return (w[:-2, :-2], w[:-2, 1:-1], w[:-2, 2:],
            w[1:-1, :-2], w[1:-1, 1:-1], w[1:-1, 2:],
            w[2:, :-2], w[2:, 1:-1], w[2:, 2:])


def _horn_gradient(w, cs):
    a, b, c, d, _, f, g, h, i = _neighbours(w)
    dz_dx = ((c + 2 * f + i) - (a + 2 * d + g)) / (8 * cs)
    dz_dy = ((a + 2 * b + c) - (g + 2 * h + i)) / (8 * cs)  # northward positive
    return dz_dx, dz_dy


def _slope_kernel(w, cs):
    dz_dx, dz_dy = _horn_gradient(w, cs)
    return np.degrees(np.arctan(np.hypot(dz_dx, dz_dy)))


def _aspect_kernel(w, cs):
    dz_dx, dz_dy = _horn_gradient(w, cs)
    with np.errstate(invalid="ignore"):
        out = np.degrees(np.arctan2(-dz_dx, -dz_dy)) % 360.0
        out[out >= 360.0] = 0.0
        out[np.hypot(dz_dx, dz_dy) < FLAT_GRADIENT] = FLAT_ASPECT
    return out


def _curvature_kernel(w, cs):
    _, b, _, d, e, f, _, h, _ = _neighbours(w)
    d2x = ((d + f) / 2 - e) / (cs * cs)
    d2y = ((b + h) / 2 - e) / (cs * cs)
    return -2.0 * (d2x + d2y) * 100.0


def slope_degrees(dem: Grid, workers=None) -> Grid:
    """Slope in degrees from Horn's 3x3 finite differences."""
    return from_masked(dem, _window_op(dem, _slope_kernel, workers))


def aspect_degrees(dem: Grid, workers=None) -> Grid:
    """Downslope direction, degrees clockwise from north; flat cells are -1."""
    return from_masked(dem, _window_op(dem, _aspect_kernel, workers))


def curvature(dem: Grid, workers=None) -> Grid:
    """Zevenbergen-Thorne general curvature x100, positive on convex ground."""
    return from_masked(dem, _window_op(dem, _curvature_kernel, workers))


# --------------------------------------------------------------------------
# D8 routing

@njit(cache=True)
def _priority_flood(z, valid):
    n, m = z.shape
    out = z.copy()
    closed = np.zeros((n, m), dtype=np.bool_)
    heap = [(0.0, np.int64(0))]
    heap.pop()
    for r in range(n):
        for c in range(m):
            if not valid[r, c]:
                continue
            edge = r == 0 or c == 0 or r == n - 1 or c == m - 1
            if not edge:
                for dr in range(-1, 2):
                    for dc in range(-1, 2):
                        if not valid[r + dr, c + dc]:
                            edge = True
            if edge:
                closed[r, c] = True
                heapq.heappush(heap, (out[r, c], np.int64(r * m + c)))
    while len(heap) > 0:
        zc, idx = heapq.heappop(heap)
        r = idx // m
        c = idx % m
        for dr in range(-1, 2):
            for dc in range(-1, 2):
                rr = r + dr
                cc = c + dc
                if rr < 0 or rr >= n or cc < 0 or cc >= m:
                    continue
                if closed[rr, cc] or not valid[rr, cc]:
                    continue
                closed[rr, cc] = True
                if out[rr, cc] <= zc:
                    out[rr, cc] = np.nextafter(zc, np.inf)
                heapq.heappush(heap, (out[rr, cc], np.int64(rr * m + cc)))
    return out


def fill_depressions(dem: Grid) -> Grid:
    """Priority-flood fill leaving every non-edge cell a strictly lower neighbour.

    Cells on the grid border or next to nodata are outlets. Filled flats get
    one-ulp gradients toward their spill point.
    """
    valid = dem.valid
    z = np.where(valid, dem.values, np.nan)
    return from_masked(dem, _priority_flood(z, valid))


def flow_direction_d8(dem: Grid, workers=None) -> Grid:
    """D8 steepest-descent direction codes on the depression-filled DEM.

    Ties go to the lowest code. Cells with no lower neighbour drain off the
    grid (or into adjacent nodata) through the lowest-coded open side.
    """
    filled = fill_depressions(dem).masked(np.nan)
    zp = np.pad(filled, 1, constant_values=np.nan)
    n, m = filled.shape
    cs = dem.cell_size

    def band(r0, r1):
        zc = zp[r0 + 1:r1 + 1, 1:-1]
        best = np.zeros(zc.shape)
        code = np.zeros(zc.shape, dtype=np.int64)
        edge_code = np.zeros(zc.shape, dtype=np.int64)
        for k, dr, dc in D8:
            nb = zp[r0 + 1 + dr:r1 + 1 + dr, 1 + dc:m + 1 + dc]
            dist = cs * np.sqrt(2.0) if dr and dc else cs
            with np.errstate(invalid="ignore"):
                drop = (zc - nb) / dist
                steeper = drop > best
            best = np.where(steeper, drop, best)
            code = np.where(steeper, k, code)
            open_side = np.isnan(nb) & (edge_code == 0)
            edge_code[open_side] = k
        code = np.where(code == 0, edge_code, code)
        return code

    codes = np.vstack(map_bands(band, n, workers))
    codes[np.isnan(filled)] = CATEGORICAL_NODATA
    return Grid(dem.georef, codes, CATEGORICAL_NODATA, CATEGORICAL)


def downstream_index(fdir: Grid):
    """Flat index of each cell's receiver, or -1 for outlets and nodata."""
    n, m = fdir.shape
    codes = fdir.values
    valid = fdir.valid
    rows, cols = np.indices((n, m))
    down = np.full(n * m, -1, dtype=np.int64)
    for k, dr, dc in D8:
        sel = valid & (codes == k)
        rr = rows[sel] + dr
        cc = cols[sel] + dc
        inside = (rr >= 0) & (rr < n) & (cc >= 0) & (cc < m)
        src = np.flatnonzero(sel)[inside]
        tgt = rr[inside] * m + cc[inside]
        ok = valid.ravel()[tgt]
        down[src[ok]] = tgt[ok]
    bad = valid & ~np.isin(codes, [NO_OUTFLOW] + [k for k, _, _ in D8])
    if bad.any():
        r, c = np.argwhere(bad)[0]
        raise ValueError(f"invalid flow direction code {codes[r, c]} at ({r}, {c})")
    return down


def flow_accumulation(fdir: Grid) -> Grid:
    """Number of upstream cells draining through each cell (itself excluded).

    Processed as topological wavefronts: a cell is released once all of its
    donors have been counted. Raises if the directions contain a cycle.
    """
    valid = fdir.valid.ravel()
    down = downstream_index(fdir)
    n_cells = down.size
    indeg = np.bincount(down[down >= 0], minlength=n_cells)
    acc = np.zeros(n_cells)
    done = np.zeros(n_cells, dtype=bool)
    front = np.flatnonzero(valid & (indeg == 0))
    while front.size:
        done[front] = True
        tgt = down[front]
        keep = tgt >= 0
        tgt = tgt[keep]
        np.add.at(acc, tgt, acc[front[keep]] + 1.0)
        np.subtract.at(indeg, tgt, 1)
        tgt = np.unique(tgt)
        front = tgt[indeg[tgt] == 0]
    if (valid & ~done).any():
        raise ValueError("cycle detected in flow directions")
    acc[~valid] = np.nan
    acc[np.isnan(acc)] = DEFAULT_NODATA
    return Grid(fdir.georef, acc.reshape(fdir.shape), DEFAULT_NODATA, CONTINUOUS)


# --------------------------------------------------------------------------
# Hydrological indices

def _catchment_and_tan(acc: Grid, slope_deg: Grid):
    align_check([acc, slope_deg])
    a = acc.masked(np.nan)
    if (a < 0).any():
        raise ValueError("flow accumulation must be non-negative")
    area = (a + 1.0) * acc.cell_size
    tan_b = np.maximum(np.tan(np.radians(slope_deg.masked(np.nan))), MIN_TAN_SLOPE)
    return area, tan_b


def spi(acc: Grid, slope_deg: Grid) -> Grid:
    """Stream power index ln(As * tan(slope)), As = (acc + 1) * cell_size."""
    area, tan_b = _catchment_and_tan(acc, slope_deg)
    return from_masked(slope_deg, np.log(area * tan_b))


def twi(acc: Grid, slope_deg: Grid) -> Grid:
    """Topographic wetness index ln(As / tan(slope))."""
    area, tan_b = _catchment_and_tan(acc, slope_deg)
    return from_masked(slope_deg, np.log(area / tan_b))


def ndvi(ir_band: Grid, red_band: Grid) -> Grid:
    """(IR - R) / (IR + R) clamped to [-1, 1]; zero-sum cells become nodata."""
    align_check([ir_band, red_band])
    ir = ir_band.masked(np.nan)
    red = red_band.masked(np.nan)
    total = ir + red
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.clip((ir - red) / total, -1.0, 1.0)
    out[total == 0] = np.nan
    return from_masked(ir_band, out)


@dataclass(frozen=True)
class CutFillResult:
    classes: Grid
    cut_volume: float
    fill_volume: float


def cut_fill(dem_old: Grid, dem_new: Grid, tau=0.0) -> CutFillResult:
    """Classify elevation change: 1 net gain, 0 unchanged, 2 net loss.

    Volumes are in elevation units times map area; cut is removed material.
    """
    if tau < 0:
        raise ValueError("tau must be non-negative")
    align_check([dem_old, dem_new])
    valid = dem_old.valid & dem_new.valid
    dz = np.where(valid, dem_new.values - dem_old.values, 0.0)
    gain = valid & (dz > tau)
    loss = valid & (-dz > tau)
    cls = np.full(dz.shape, CATEGORICAL_NODATA, dtype=np.int64)
    cls[valid] = CUT_FILL_UNCHANGED
    cls[gain] = CUT_FILL_GAIN
    cls[loss] = CUT_FILL_LOSS
    area = dem_old.georef.cell_area
    grid = Grid(dem_old.georef, cls, CATEGORICAL_NODATA, CATEGORICAL)
    return CutFillResult(
        grid,
        float(np.abs(dz[loss]).sum() * area),
        float(np.abs(dz[gain]).sum() * area),
    )
