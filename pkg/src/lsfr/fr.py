"""Frequency-ratio model: inventory rasterisation, per-class pixel accounting,
FR tables, FR rasters, the susceptibility index (LSI), zonation and area reports.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .classify import ClassBreaks, reclassify
from .parallel import map_bands
from .raster import (CATEGORICAL, CATEGORICAL_NODATA, DEFAULT_NODATA, GeoRef, Grid,
                     align_check, from_masked)

ZONE_NAMES = ("very low", "low", "moderate", "high", "very high")


@dataclass(frozen=True)
class InventoryPoint:
    x: float
    y: float
    id: str | None = None


def read_inventory_csv(path) -> list[InventoryPoint]:
    """Read landslide points from a CSV with header ``x,y[,id]``."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"x", "y"} <= {f.strip() for f in reader.fieldnames}:
            raise ValueError(f"{path}: inventory CSV needs an 'x,y[,id]' header")
        points = []
        for lineno, row in enumerate(reader, start=2):
            row = {k.strip(): v for k, v in row.items()}
            try:
                x, y = float(row["x"]), float(row["y"])
            except (TypeError, ValueError):
                raise ValueError(f"{path}:{lineno}: bad coordinate") from None
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValueError(f"{path}:{lineno}: coordinates must be finite")
            pid = row.get("id")
            points.append(InventoryPoint(x, y, pid if pid not in (None, "") else None))
    return points


def write_inventory_csv(points: Iterable[InventoryPoint], path):
    points = list(points)
    with_id = any(p.id is not None for p in points)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "id"] if with_id else ["x", "y"])
        for p in points:
            row = [repr(float(p.x)), repr(float(p.y))]
            if with_id:
                row.append("" if p.id is None else p.id)
            w.writerow(row)


def rasterize_inventory(points: Sequence[InventoryPoint], template: GeoRef):
    """Burn points into a 0/1 mask on ``template``.

    A point belongs to the cell containing it (floor rule), so points on a
    shared edge go to the cell east / south of that edge. Returns
    ``(mask, n_skipped)`` where ``n_skipped`` counts points outside the extent.
    """
    mask = np.zeros(template.shape, dtype=np.int64)
    top = template.y_origin + template.n_rows * template.cell_size
    skipped = 0
    for p in points:
        col = math.floor((p.x - template.x_origin) / template.cell_size)
        row = math.floor((top - p.y) / template.cell_size)
        if 0 <= row < template.n_rows and 0 <= col < template.n_cols:
            mask[row, col] = 1
        else:
            skipped += 1
    if points and skipped == len(points):
        raise ValueError("all inventory points fall outside the grid extent")
    return Grid(template, mask, CATEGORICAL_NODATA, CATEGORICAL), skipped


def mask_to_points(mask: Grid) -> list[InventoryPoint]:
    """Cell-centre points for every marked cell, in row-major order."""
    rows, cols = np.nonzero(mask.valid & (mask.values != 0))
    return [InventoryPoint(*mask.georef.cell_center(r, c)) for r, c in zip(rows, cols)]


# --------------------------------------------------------------------------
# FR tables

@dataclass(frozen=True)
class FactorClassStats:
    class_id: int
    n_pix_class: int
    n_pix_slide: int
    pct_class: float = math.nan
    pct_slide: float = math.nan
    fr: float = math.nan
    label: str = ""


@dataclass(frozen=True)
class FactorFrTable:
    factor: str
    classes: tuple

    @property
    def total_class(self):
        return sum(c.n_pix_class for c in self.classes)

    @property
    def total_slide(self):
        return sum(c.n_pix_slide for c in self.classes)

    def fr_by_class(self):
        return {c.class_id: c.fr for c in self.classes}

    def with_labels(self, labels):
        """Attach labels by position in class-ID order, or from a ``{id: label}`` mapping."""
        if isinstance(labels, dict):
            rows = [replace(c, label=labels.get(c.class_id, c.label)) for c in self.classes]
        else:
            rows = [replace(c, label=lab) for c, lab in zip(self.classes, labels)]
        return FactorFrTable(self.factor, tuple(rows))


def table_from_counts(factor, counts, labels=None) -> FactorFrTable:
    """Build a counts-only table from ``[(n_pix_class, n_pix_slide), ...]``."""
    rows = []
    for i, (n_cls, n_sl) in enumerate(counts):
        label = labels[i] if labels else ""
        rows.append(FactorClassStats(i + 1, int(n_cls), int(n_sl), label=label))
    return FactorFrTable(factor, tuple(rows))


def class_stats(factor_classes: Grid, inventory: Grid, factor="factor",
                class_ids=None, workers=None) -> FactorFrTable:
    """Per-class counts of all data cells and of landslide cells.

    Only this factor's nodata is excluded. ``class_ids`` lists classes to report
    even when they hold no cells.
    """
    align_check([factor_classes, inventory])
    if factor_classes.kind != CATEGORICAL:
        raise ValueError("class_stats needs a categorical class grid")
    valid = factor_classes.valid
    cls = factor_classes.values
    slide = inventory.valid & (inventory.values != 0)
    ids = np.unique(cls[valid])
    if class_ids is not None:
        ids = np.union1d(ids, np.asarray(list(class_ids), dtype=np.int64))
    if ids.size == 0:
        raise ValueError("factor grid has no classes")

    def band(r0, r1):
        v = valid[r0:r1]
        c = np.searchsorted(ids, cls[r0:r1][v])
        s = slide[r0:r1][v]
        return (np.bincount(c, minlength=ids.size),
                np.bincount(c[s], minlength=ids.size))

    parts = map_bands(band, factor_classes.shape[0], workers)
    n_cls = sum(p[0] for p in parts)
    n_sl = sum(p[1] for p in parts)
    rows = tuple(FactorClassStats(int(i), int(a), int(b))
                 for i, a, b in zip(ids, n_cls, n_sl))
    return FactorFrTable(factor, rows)


def frequency_ratio(table: FactorFrTable) -> FactorFrTable:
    """Fill percentages and FR = (slide share of class) / (area share of class).

    Classes without landslide pixels get FR 0.
    """
    total_n = table.total_class
    total_s = table.total_slide
    if total_s <= 0:
        raise ValueError(f"{table.factor}: no landslide pixels, FR undefined")
    if total_n <= 0:
        raise ValueError(f"{table.factor}: no data pixels, FR undefined")
    rows = []
    for c in table.classes:
        share_n = c.n_pix_class / total_n
        share_s = c.n_pix_slide / total_s
        fr = share_s / share_n if c.n_pix_slide > 0 else 0.0
        rows.append(replace(c, pct_class=100.0 * share_n, pct_slide=100.0 * share_s, fr=fr))
    return FactorFrTable(table.factor, tuple(rows))


def fr_raster(factor_classes: Grid, table: FactorFrTable) -> Grid:
    """Replace each class ID with its FR value."""
    valid = factor_classes.valid
    ids = np.array([c.class_id for c in table.classes], dtype=np.int64)
    frs = np.array([c.fr for c in table.classes])
    order = np.argsort(ids)
    ids, frs = ids[order], frs[order]
    present = np.unique(factor_classes.values[valid])
    missing = np.setdiff1d(present, ids)
    if missing.size:
        raise ValueError(f"{table.factor}: class {int(missing[0])} is not in the FR table")
    out = np.full(factor_classes.shape, np.nan)
    out[valid] = frs[np.searchsorted(ids, factor_classes.values[valid])]
    return Grid(factor_classes.georef, np.where(valid, out, DEFAULT_NODATA),
                DEFAULT_NODATA)


def lsi(fr_rasters: Sequence[Grid]) -> Grid:
    """Cell-wise sum of FR rasters; nodata in any input gives nodata."""
    if not fr_rasters:
        raise ValueError("lsi needs at least one raster")
    align_check(list(fr_rasters))
    total = np.zeros(fr_rasters[0].shape)
    for g in fr_rasters:
        total += g.masked(np.nan)
    return from_masked(Grid(fr_rasters[0].georef, np.zeros(total.shape)), total)


def zonate(lsi_grid: Grid, breaks: ClassBreaks) -> Grid:
    """Five susceptibility zones, 1 = very low ... 5 = very high."""
    if breaks.k != len(ZONE_NAMES):
        raise ValueError(f"zonation needs exactly 5 classes, got {breaks.k}")
    return reclassify(lsi_grid, breaks)


@dataclass(frozen=True)
class ZoneArea:
    zone: int
    name: str
    pixels: int
    area_km2: float
    area_pct: float


def area_report(zones: Grid) -> list[ZoneArea]:
    """Pixel count, area in km^2 (map units taken as metres) and share of the
    zoned area for zones 1..5."""
    valid = zones.valid
    counts = np.bincount(zones.values[valid].astype(np.int64), minlength=len(ZONE_NAMES) + 1)
    total = int(valid.sum())
    cell_m = zones.cell_size
    out = []
    for z, name in enumerate(ZONE_NAMES, start=1):
        n = int(counts[z]) if z < counts.size else 0
        out.append(ZoneArea(
            z, name, n,
            n * cell_m * cell_m / 1e6,
            100.0 * n / total if total else 0.0,
        ))
    return out


# --------------------------------------------------------------------------
# CSV exports

FR_COLUMNS = ("factor", "class_label", "class_id", "n_pix_class", "pct_class",
              "n_pix_slide", "pct_slide", "fr")


def fmt6(v):
    """Six significant digits, the fixed float format of every CSV output."""
    return f"{v:.6g}"


def write_fr_csv(tables: Iterable[FactorFrTable], path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FR_COLUMNS)
        for t in tables:
            for c in t.classes:
                w.writerow([t.factor, c.label, c.class_id, c.n_pix_class, fmt6(c.pct_class),
                            c.n_pix_slide, fmt6(c.pct_slide), fmt6(c.fr)])


def read_fr_csv(path) -> list[FactorFrTable]:
    """Read FR tables back; factors keep their order of first appearance."""
    by_factor = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            by_factor.setdefault(row["factor"], []).append(FactorClassStats(
                int(row["class_id"]), int(row["n_pix_class"]), int(row["n_pix_slide"]),
                float(row["pct_class"]), float(row["pct_slide"]), float(row["fr"]),
                row["class_label"],
            ))
    return [FactorFrTable(f, tuple(rows)) for f, rows in by_factor.items()]


def write_area_csv(rows: Iterable[ZoneArea], path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["zone", "name", "pixels", "area_km2", "area_pct"])
        for r in rows:
            w.writerow([r.zone, r.name, r.pixels, fmt6(r.area_km2), fmt6(r.area_pct)])
