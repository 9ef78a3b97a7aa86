"""Deterministic synthetic catchment used for demos and end-to-end tests.

A 64x64 ridged cone at 30 m with every auxiliary input a 13-factor run
needs, and a landslide inventory planted on the steepest cells.
"""

from pathlib import Path

import numpy as np

from .fr import InventoryPoint, write_inventory_csv
from .raster import CATEGORICAL, GeoRef, Grid, write_ascii_grid
from .terrain import slope_degrees

SIZE = 64
CELL = 30.0
ORIGIN = (500000.0, 2400000.0)
SEED = 20240601

CONFIG = """\
# 13-factor frequency-ratio run on the bundled synthetic catchment.
# Paths are relative to this file.
dem: dem.asc
dem_old: dem_old.asc
output_dir: out
workers: 1

inputs:
  roads: roads.asc
  ir: nir.asc
  red: red.asc

inventory:
  points: inventory.csv

streams:
  threshold: 25
density:
  radius: 150
cut_fill:
  tau: 0.5

factors:
  - {name: slope, source: derived(slope), kind: continuous, classification: {method: jenks, k: 5}}
  - {name: elevation, source: derived(elevation), kind: continuous, classification: {method: jenks, k: 5}}
  - {name: aspect, source: derived(aspect), kind: continuous, classification: {method: equal_interval, k: 5, min: 0, max: 360}}
  - {name: curvature, source: derived(curvature), kind: continuous, classification: {method: jenks, k: 5}}
  - {name: spi, source: derived(spi), kind: continuous, classification: {method: jenks, k: 5}}
  - {name: twi, source: derived(twi), kind: continuous, classification: {method: jenks, k: 5}}
  - {name: drainage_distance, source: derived(drainage_distance), kind: continuous, classification: {method: jenks, k: 5}}
  - {name: drainage_density, source: derived(drainage_density), kind: continuous, classification: {method: jenks, k: 5}}
  - {name: road_distance, source: derived(road_distance), kind: continuous, classification: {method: jenks, k: 5}}
  - {name: rainfall, source: file(rainfall.asc), kind: continuous, classification: {method: jenks, k: 5}}
  - {name: land_use, source: file(landuse.asc), kind: categorical, classification: {method: categorical}}
  - {name: cut_fill, source: derived(cut_fill), kind: categorical, classification: {method: categorical}}
  - {name: ndvi, source: derived(ndvi), kind: continuous, classification: {method: jenks, k: 5}}

zonation:
  method: jenks
  k: 5

validation:
  train_ratio: 0.7
  seed: 42
  bins: 100
"""


def _georef(size=SIZE):
    return GeoRef(ORIGIN[0], ORIGIN[1], CELL, size, size)


def synthetic_layers(size=SIZE):
    """All synthetic rasters as a dict of Grids plus the inventory points.

    ``size`` other than the default stretches the same catchment onto a larger
    lattice (used for timing runs); the default reproduces the bundled data.
    """
    rng = np.random.default_rng(SEED)
    georef = _georef(size)
    f = size / SIZE
    r, c = np.indices((size, size), dtype=np.float64)
    r, c = r / f, c / f
    mid = (size - 1) / 2 / f
    dy, dx = r - mid, c - mid
    rad = np.hypot(dx, dy)
    theta = np.arctan2(dy, dx)
    dem = (650.0 * np.exp(-(rad / 24.0) ** 2)
           + 40.0 * np.sin(3 * theta) * np.exp(-(rad / 18.0) ** 2) * (rad / 10.0)
           + 0.6 * rad + 5.0 * np.sin(c / 4.0) * np.cos(r / 6.0) + 20.0)
    dem = np.round(dem, 3)
    dem_g = Grid(georef, dem)

    cut = rng.normal(0.0, 1.2, dem.shape)
    cut[rng.random(dem.shape) < 0.1] = 0.0
    dem_old = np.round(dem + cut, 3)

    roads = np.zeros(dem.shape, dtype=np.int64)
    roads[int(40 * f), :] = 1
    roads[:, int(12 * f)] = 1
    diag = np.arange(int(10 * f), int(30 * f))
    roads[diag, diag + int(20 * f)] = 1

    rainfall = np.round(1200.0 + 8.0 * c - 4.0 * r + 30.0 * rng.standard_normal(dem.shape), 2)

    landuse = np.ones(dem.shape, dtype=np.int64) * 3
    landuse[(r - 50) ** 2 + (c - 14) ** 2 < 60] = 1
    landuse[(r > 36) & (r < 46)] = 2
    landuse[:, int(8 * f):int(16 * f)] = 2

    slope = slope_degrees(dem_g).values
    veg = 0.55 - 0.004 * slope + 0.04 * rng.standard_normal(dem.shape)
    red = np.round(np.clip(0.12 - 0.1 * veg + 0.01 * rng.standard_normal(dem.shape), 0.01, 1), 4)
    nir = np.round(np.clip(red * (1 + veg) / (1 - np.clip(veg, -0.9, 0.9)), 0.01, 1), 4)

    # plant slides on the steepest ground, jittered inside each cell
    steep = np.flatnonzero(slope.ravel() >= np.quantile(slope, 0.85))
    picks = np.sort(rng.choice(steep, size=int(120 * f * f), replace=False))
    points = []
    for i, idx in enumerate(picks):
        row, col = divmod(int(idx), size)
        x, y = georef.cell_center(row, col)
        jx, jy = rng.uniform(-0.4, 0.4, 2) * CELL
        points.append(InventoryPoint(round(x + jx, 2), round(y + jy, 2), f"LS{i + 1:03d}"))

    layers = {
        "dem": dem_g,
        "dem_old": Grid(georef, dem_old),
        "roads": Grid(georef, roads, kind=CATEGORICAL),
        "rainfall": Grid(georef, rainfall),
        "landuse": Grid(georef, landuse, kind=CATEGORICAL),
        "nir": Grid(georef, nir),
        "red": Grid(georef, red),
    }
    return layers, points


def write_synthetic(out_dir, size=SIZE):
    """Write the synthetic dataset and its pipeline config; returns the config path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    layers, points = synthetic_layers(size)
    for name, grid in layers.items():
        write_ascii_grid(grid, out / f"{name}.asc")
    write_inventory_csv(points, out / "inventory.csv")
    cfg = out / "pipeline.yaml"
    cfg.write_text(CONFIG)
    return cfg


def bundled_dir():
    return Path(__file__).parent / "data" / "synthetic"
