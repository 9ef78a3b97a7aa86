"""Class breaks (Jenks natural breaks, equal interval, manual, categorical) and reclassification."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .raster import CATEGORICAL, CATEGORICAL_NODATA, Grid

JENKS = "jenks"
EQUAL_INTERVAL = "equal_interval"
MANUAL = "manual"
CATEGORY = "categorical"
METHODS = (JENKS, EQUAL_INTERVAL, MANUAL, CATEGORY)

MAX_JENKS_VALUES = 2 ** 20


@dataclass(frozen=True)
class ClassBreaks:
    """Upper class bounds; class i holds ``uppers[i-1] < v <= uppers[i]``.

    For ``categorical`` breaks ``uppers`` lists the category IDs instead.
    """

    method: str
    uppers: tuple

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown classification method {self.method!r}")
        uppers = tuple(float(u) for u in self.uppers)
        if not uppers:
            raise ValueError("empty class breaks")
        if any(b <= a for a, b in zip(uppers, uppers[1:])):
            raise ValueError(f"class uppers must be strictly increasing: {uppers}")
        if self.method in (JENKS, EQUAL_INTERVAL) and len(uppers) < 2:
            raise ValueError("generated breaks need at least 2 classes")
        object.__setattr__(self, "uppers", uppers)

    @property
    def k(self):
        return len(self.uppers)

    def labels(self, lower=None):
        """Human-readable class labels such as ``"5.08 - 11.44"``."""
        if self.method == CATEGORY:
            return [_fmt(u) for u in self.uppers]
        out = []
        prev = lower
        for u in self.uppers:
            out.append(f"<= {_fmt(u)}" if prev is None else f"{_fmt(prev)} - {_fmt(u)}")
            prev = u
        return out

    def to_dict(self):
        return {"method": self.method, "uppers": list(self.uppers)}

    @classmethod
    def from_dict(cls, d):
        return cls(d["method"], tuple(d["uppers"]))


def _fmt(v):
    if np.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.6g}"


# --------------------------------------------------------------------------
# Fisher-Jenks

@njit(cache=True)
def _ssd(cw, c1, c2, i, j):
    # within-class squared deviation of distinct values i..j inclusive
    w = cw[j + 1] - cw[i]
    s = c1[j + 1] - c1[i]
    v = (c2[j + 1] - c2[i]) - s * s / w
    return v if v > 0.0 else 0.0


@njit(cache=True)
def _fisher_jenks(x, w, k):
    n = x.shape[0]
    cw = np.zeros(n + 1)
    c1 = np.zeros(n + 1)
    c2 = np.zeros(n + 1)
    for i in range(n):
        cw[i + 1] = cw[i] + w[i]
        c1[i + 1] = c1[i] + w[i] * x[i]
        c2[i + 1] = c2[i] + w[i] * x[i] * x[i]
    prev = np.empty(n)
    cur = np.empty(n)
    start = np.zeros((k, n), dtype=np.int64)
    for j in range(n):
        prev[j] = _ssd(cw, c1, c2, 0, j)
    # optimal split points are monotone in j, so each layer is solved by
    # divide and conquer over (j range, split range)
    stack = np.empty((4 * n + 4, 4), dtype=np.int64)
    for layer in range(1, k):
        cur[:] = np.inf
        top = 0
        stack[0, 0] = layer
        stack[0, 1] = n - 1
        stack[0, 2] = layer
        stack[0, 3] = n - 1
        top = 1
        while top > 0:
            top -= 1
            jlo = stack[top, 0]
            jhi = stack[top, 1]
            olo = stack[top, 2]
            ohi = stack[top, 3]
            if jlo > jhi:
                continue
            mid = (jlo + jhi) // 2
            best = np.inf
            arg = olo
            hi = min(mid, ohi)
            for i in range(max(olo, layer), hi + 1):
                val = prev[i - 1] + _ssd(cw, c1, c2, i, mid)
                if val < best:
                    best = val
                    arg = i
            cur[mid] = best
            start[layer, mid] = arg
            stack[top, 0] = jlo
            stack[top, 1] = mid - 1
            stack[top, 2] = olo
            stack[top, 3] = arg
            top += 1
            stack[top, 0] = mid + 1
            stack[top, 1] = jhi
            stack[top, 2] = arg
            stack[top, 3] = ohi
            top += 1
        prev, cur = cur, prev
    ends = np.empty(k, dtype=np.int64)
    j = n - 1
    for layer in range(k - 1, -1, -1):
        ends[layer] = j
        if layer > 0:
            j = start[layer, j] - 1
    return ends, prev[n - 1]


def jenks_partition(values, k):
    """Optimal class end indices into the sorted distinct values, and the total SSD."""
    vals = np.asarray(values, dtype=np.float64).ravel()
    distinct, counts = np.unique(vals, return_counts=True)
    if k < 2:
        raise ValueError("jenks needs k >= 2")
    if distinct.size < k:
        raise ValueError(f"jenks needs at least {k} distinct values, got {distinct.size}")
    centre = distinct.mean()
    ends, cost = _fisher_jenks(distinct - centre, counts.astype(np.float64), k)
    return distinct, ends, cost


def stratified_sample(values, size, seed=0):
    """Deterministic sample of ``size`` values: one random draw per sorted stratum."""
    vals = np.sort(np.asarray(values, dtype=np.float64).ravel())
    if vals.size <= size:
        return vals
    rng = np.random.default_rng(seed)
    edges = np.linspace(0, vals.size, size + 1).astype(np.int64)
    picks = edges[:-1] + (rng.random(size) * (edges[1:] - edges[:-1])).astype(np.int64)
    picks[0], picks[-1] = 0, vals.size - 1
    return vals[picks]


def jenks_breaks(values, k, max_values=MAX_JENKS_VALUES, seed=0) -> ClassBreaks:
    """Natural breaks minimising the total within-class sum of squared deviations.

    Exact on the full multiset up to ``max_values`` values, otherwise exact on
    a seeded stratified sample.
    """
    vals = np.asarray(values, dtype=np.float64).ravel()
    vals = vals[np.isfinite(vals)]
    if vals.size > max_values:
        vals = stratified_sample(vals, max_values, seed)
    distinct, ends, _ = jenks_partition(vals, k)
    return ClassBreaks(JENKS, tuple(distinct[ends]))


def equal_interval_breaks(vmin, vmax, k) -> ClassBreaks:
    if k < 2:
        raise ValueError("equal interval needs k >= 2")
    if not vmax > vmin:
        raise ValueError(f"degenerate range for equal interval: min {vmin}, max {vmax}")
    step = (vmax - vmin) / k
    uppers = [vmin + i * step for i in range(1, k)] + [vmax]
    return ClassBreaks(EQUAL_INTERVAL, tuple(uppers))


def within_class_ssd(values, breaks: ClassBreaks):
    vals = np.asarray(values, dtype=np.float64).ravel()
    cls = classify_values(vals, breaks)
    total = 0.0
    for c in np.unique(cls):
        part = vals[cls == c]
        total += float(((part - part.mean()) ** 2).sum())
    return total


# --------------------------------------------------------------------------

def classify_values(values, breaks: ClassBreaks):
    """1-based class IDs; values above the last upper fall in the last class."""
    up = np.asarray(breaks.uppers)
    cls = np.searchsorted(up, values, side="left") + 1
    return np.minimum(cls, up.size)


def reclassify(grid: Grid, breaks: ClassBreaks, workers=None) -> Grid:
    """Turn a continuous grid into class IDs 1..k; nodata propagates.

    Categorical breaks pass a categorical grid's class IDs through unchanged.
    """
    if not breaks.uppers:
        raise ValueError("empty class breaks")
    if breaks.method == CATEGORY:
        if grid.kind != CATEGORICAL:
            raise ValueError("categorical breaks need a categorical grid")
        return grid
    from .parallel import map_bands

    valid = grid.valid
    vals = grid.values

    def band(r0, r1):
        out = classify_values(vals[r0:r1], breaks)
        return np.where(valid[r0:r1], out, CATEGORICAL_NODATA)

    cls = np.vstack(map_bands(band, grid.shape[0], workers))
    return Grid(grid.georef, cls, CATEGORICAL_NODATA, CATEGORICAL)
