"""Grid data model, ESRI ASCII Grid I/O, alignment checks and PNG rendering."""

from __future__ import annotations

import re
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Sequence

import numpy as np

DEFAULT_NODATA = -9999.0
CATEGORICAL_NODATA = -9999
CONTINUOUS = "continuous"
CATEGORICAL = "categorical"

_HEADER_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value")


class GridFormatError(ValueError):
    """Malformed ASCII grid file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class AlignmentError(ValueError):
    """Two grids do not share the same lattice."""


@dataclass(frozen=True)
class GeoRef:
    x_origin: float
    y_origin: float
    cell_size: float
    n_rows: int
    n_cols: int

    def __post_init__(self):
        if not self.cell_size > 0:
            raise ValueError(f"cell_size must be positive, got {self.cell_size}")
        if self.n_rows < 1 or self.n_cols < 1:
            raise ValueError(f"grid must be at least 1x1, got {self.n_rows}x{self.n_cols}")

    @property
    def shape(self):
        return (self.n_rows, self.n_cols)

    @property
    def cell_area(self):
        return self.cell_size * self.cell_size

    def cell_center(self, row, col):
        """Map coordinates of a cell centre (row 0 is the northern edge)."""
        x = self.x_origin + (col + 0.5) * self.cell_size
        y = self.y_origin + (self.n_rows - row - 0.5) * self.cell_size
        return x, y


@dataclass(frozen=True, eq=False)
class Grid:
    """A georeferenced raster; ``values[0]`` is the northernmost row.

    The value array is made read-only on construction. Continuous grids hold
    float64, categorical grids int64 class IDs.
    """

    georef: GeoRef
    values: np.ndarray
    nodata: float = DEFAULT_NODATA
    kind: str = CONTINUOUS

    def __post_init__(self):
        if self.kind not in (CONTINUOUS, CATEGORICAL):
            raise ValueError(f"unknown grid kind {self.kind!r}")
        arr = np.asarray(self.values)
        if arr.shape != self.georef.shape:
            raise ValueError(
                f"values shape {arr.shape} does not match georef {self.georef.shape}"
            )
        if self.kind == CATEGORICAL:
            if arr.dtype.kind == "f":
                ok = arr == self.nodata
                ok |= np.isfinite(arr) & (arr == np.round(arr)) & (arr >= 0)
                if not ok.all():
                    raise ValueError("categorical grid values must be non-negative integers")
            arr = arr.astype(np.int64, copy=True)
            nodata = int(self.nodata)
            valid = arr != nodata
            if (arr[valid] < 0).any():
                raise ValueError("categorical grid values must be non-negative integers")
            object.__setattr__(self, "nodata", nodata)
        else:
            arr = arr.astype(np.float64, copy=True)
            object.__setattr__(self, "nodata", float(self.nodata))
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def shape(self):
        return self.values.shape

    @property
    def cell_size(self):
        return self.georef.cell_size

    @property
    def valid(self):
        """Boolean mask of cells holding data."""
        if self.kind == CATEGORICAL:
            return self.values != self.nodata
        return (self.values != self.nodata) & ~np.isnan(self.values)

    def masked(self, fill=np.nan):
        """Float copy of the values with nodata replaced by ``fill``."""
        out = self.values.astype(np.float64)
        out[~self.valid] = fill
        return out

    def with_values(self, values, kind=None, nodata=None):
        return Grid(
            self.georef,
            values,
            self.nodata if nodata is None else nodata,
            self.kind if kind is None else kind,
        )

    def __eq__(self, other):
        if not isinstance(other, Grid):
            return NotImplemented
        return (
            self.georef == other.georef
            and self.kind == other.kind
            and self.nodata == other.nodata
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def from_array(values, cell_size=1.0, x_origin=0.0, y_origin=0.0,
               nodata=DEFAULT_NODATA, kind=CONTINUOUS):
    """Build a grid from a 2-D array; NaN cells become nodata."""
    arr = np.array(values, dtype=np.float64 if kind == CONTINUOUS else None, ndmin=2)
    if kind == CONTINUOUS:
        arr[np.isnan(arr)] = nodata
    georef = GeoRef(x_origin, y_origin, cell_size, arr.shape[0], arr.shape[1])
    return Grid(georef, arr, nodata, kind)


def from_masked(template: Grid, values, kind=CONTINUOUS, nodata=None):
    """Wrap ``values`` on ``template``'s lattice, turning NaN into nodata."""
    nodata = template.nodata if nodata is None else nodata
    if kind == CATEGORICAL:
        nodata = int(nodata) if float(nodata).is_integer() else CATEGORICAL_NODATA
        arr = np.asarray(values)
        if arr.dtype.kind == "f":
            bad = np.isnan(arr)
            arr = np.where(bad, 0, arr).astype(np.int64)
            arr[bad] = nodata
        return Grid(template.georef, arr, nodata, kind)
    arr = np.array(values, dtype=np.float64)
    arr[np.isnan(arr)] = nodata
    return Grid(template.georef, arr, nodata, kind)


def align_check(grids: Sequence[Grid]):
    """Raise ``AlignmentError`` unless every grid shares the first one's GeoRef."""
    if not grids:
        raise ValueError("align_check needs at least one grid")
    ref = grids[0].georef
    for i, g in enumerate(grids[1:], start=1):
        if g.georef == ref:
            continue
        for f in fields(GeoRef):
            a, b = getattr(ref, f.name), getattr(g.georef, f.name)
            if a != b:
                raise AlignmentError(
                    f"alignment mismatch: grid {i} differs in {f.name} ({b} != {a})"
                )


# --------------------------------------------------------------------------
# ESRI ASCII Grid

def _fmt_number(v):
    s = repr(float(v))
    return s[:-2] if s.endswith(".0") else s


_TRAILING_ZERO = re.compile(r"\.0(?= |$)")


def read_ascii_grid(path, kind=CONTINUOUS) -> Grid:
    """Parse an ESRI ASCII Grid file (six-line header, north row first)."""
    text = Path(path).read_text()
    lines = text.splitlines()
    header = {}
    lineno = 0
    while len(header) < len(_HEADER_KEYS):
        if lineno >= len(lines):
            missing = [k for k in _HEADER_KEYS if k not in header]
            raise GridFormatError(f"missing header key {missing[0]}", lineno)
        raw = lines[lineno]
        lineno += 1
        if not raw.strip():
            continue
        parts = raw.split()
        key = parts[0].lower()
        if key not in _HEADER_KEYS:
            if _looks_numeric(parts[0]):
                missing = [k for k in _HEADER_KEYS if k not in header]
                raise GridFormatError(f"missing header key {missing[0]}", lineno)
            raise GridFormatError(f"unknown header key {parts[0]!r}", lineno)
        if key in header:
            raise GridFormatError(f"duplicate header key {parts[0]!r}", lineno)
        if len(parts) != 2:
            raise GridFormatError(f"header key {parts[0]!r} needs exactly one value", lineno)
        try:
            header[key] = float(parts[1])
        except ValueError:
            raise GridFormatError(f"non-numeric header value {parts[1]!r}", lineno) from None

    for key in ("ncols", "nrows"):
        if not header[key].is_integer():
            raise GridFormatError(f"{key} must be an integer")
    n_cols, n_rows = int(header["ncols"]), int(header["nrows"])
    body = lines[lineno:]
    try:
        flat = np.array(" ".join(body).split(), dtype=np.float64)
    except ValueError:
        for offset, raw in enumerate(body):
            for tok in raw.split():
                if not _looks_numeric(tok):
                    raise GridFormatError(
                        f"non-numeric token {tok!r}", lineno + offset + 1
                    ) from None
        raise
    if flat.size != n_rows * n_cols:
        raise GridFormatError(
            f"value count mismatch: expected {n_rows * n_cols} "
            f"({n_rows}x{n_cols}), found {flat.size}",
            len(lines),
        )
    georef = GeoRef(header["xllcorner"], header["yllcorner"], header["cellsize"],
                    n_rows, n_cols)
    nodata = header["nodata_value"]
    values = flat.reshape(n_rows, n_cols)
    if kind == CATEGORICAL:
        return Grid(georef, values, nodata, CATEGORICAL)
    return Grid(georef, values, nodata, CONTINUOUS)


def _looks_numeric(tok):
    try:
        float(tok)
    except ValueError:
        return False
    return True


def _value_table(values, probe=4096):
    """``(distinct, inverse)`` when few enough distinct values repeat to make
    formatting each one once worthwhile, else None."""
    flat = values.ravel()
    step = max(1, flat.size // probe)
    sample = flat[::step]
    if np.unique(sample).size > 0.5 * sample.size:
        return None
    distinct, inverse = np.unique(flat, return_inverse=True)
    if distinct.size * 8 > flat.size:
        return None
    return distinct, inverse


def write_ascii_grid(grid: Grid, path):
    """Write ``grid`` as ESRI ASCII Grid with round-trip-safe number formatting."""
    g = grid.georef
    out = [
        f"ncols {g.n_cols}",
        f"nrows {g.n_rows}",
        f"xllcorner {_fmt_number(g.x_origin)}",
        f"yllcorner {_fmt_number(g.y_origin)}",
        f"cellsize {_fmt_number(g.cell_size)}",
        f"NODATA_value {_fmt_number(grid.nodata)}",
    ]
    fmt = str if grid.kind == CATEGORICAL else _fmt_number
    lookup = _value_table(grid.values)
    if lookup is not None:
        # class IDs, FR lookups, rounded data: format each distinct value once
        distinct, inverse = lookup
        table = np.array([fmt(v) for v in distinct.tolist()], dtype=object)
        for row in table[inverse.reshape(grid.shape)].tolist():
            out.append(" ".join(row))
    elif grid.kind == CATEGORICAL:
        for row in grid.values.tolist():
            out.append(" ".join(map(str, row)))
    else:
        for row in grid.values.tolist():
            out.append(_TRAILING_ZERO.sub("", " ".join(map(repr, row))))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(out))
        fh.write("\n")


# --------------------------------------------------------------------------
# Rendering

@dataclass(frozen=True)
class ColorRamp:
    stops: tuple
    nodata_color: tuple = (0, 0, 0, 0)

    def __post_init__(self):
        stops = tuple((float(p), tuple(int(c) for c in rgba)) for p, rgba in self.stops)
        if len(stops) < 2:
            raise ValueError("color ramp needs at least two stops")
        pos = [p for p, _ in stops]
        if pos[0] != 0.0 or pos[-1] != 1.0:
            raise ValueError("color ramp must start at 0 and end at 1")
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise ValueError("color ramp positions must be strictly increasing")
        for _, rgba in stops:
            if len(rgba) != 4 or not all(0 <= c <= 255 for c in rgba):
                raise ValueError(f"bad RGBA color {rgba}")
        object.__setattr__(self, "stops", stops)

    def sample(self, t):
        """RGBA uint8 colors for positions ``t`` in [0, 1]."""
        t = np.clip(np.asarray(t, dtype=np.float64), 0.0, 1.0)
        pos = np.array([p for p, _ in self.stops])
        cols = np.array([c for _, c in self.stops], dtype=np.float64)
        rgba = np.stack([np.interp(t, pos, cols[:, i]) for i in range(4)], axis=-1)
        return np.rint(rgba).astype(np.uint8)


RAMPS = {
    "susceptibility": ColorRamp((
        (0.0, (26, 150, 65, 255)),
        (0.25, (166, 217, 106, 255)),
        (0.5, (255, 255, 191, 255)),
        (0.75, (253, 174, 97, 255)),
        (1.0, (215, 25, 28, 255)),
    )),
    "terrain": ColorRamp((
        (0.0, (0, 97, 71, 255)),
        (0.4, (214, 196, 140, 255)),
        (0.8, (140, 90, 60, 255)),
        (1.0, (255, 255, 255, 255)),
    )),
    "gray": ColorRamp(((0.0, (0, 0, 0, 255)), (1.0, (255, 255, 255, 255)))),
}


def render_png(grid: Grid, ramp: ColorRamp, path, breaks=None):
    """Write an 8-bit RGBA PNG with one pixel per cell.

    Without ``breaks`` the valid range is stretched linearly onto the ramp;
    with breaks each class is given an evenly spaced ramp position.
    """
    from PIL import Image

    if ramp is None or not ramp.stops:
        raise ValueError("empty color ramp")
    valid = grid.valid
    if not valid.any():
        raise ValueError("cannot render an all-nodata grid")
    vals = grid.values[valid].astype(np.float64)
    if breaks is not None:
        from .classify import classify_values

        cls = classify_values(vals, breaks)
        k = len(breaks.uppers)
        t = (cls - 1) / (k - 1) if k > 1 else np.zeros_like(vals)
    else:
        lo, hi = vals.min(), vals.max()
        t = (vals - lo) / (hi - lo) if hi > lo else np.zeros_like(vals)
    img = np.empty(grid.shape + (4,), dtype=np.uint8)
    img[...] = np.array(ramp.nodata_color, dtype=np.uint8)
    img[valid] = ramp.sample(t)
    Image.fromarray(img).save(path, format="PNG")
