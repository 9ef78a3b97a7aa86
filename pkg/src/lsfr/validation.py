"""Inventory splitting, success/prediction-rate curves and AUC."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fr import InventoryPoint, fmt6
from .raster import Grid, align_check

DEFAULT_BINS = 100
DEFAULT_TRAIN_RATIO = 0.7


@dataclass(frozen=True)
class SplitResult:
    train: list
    test: list
    seed: int
    ratio: float


def split_inventory(points: Sequence[InventoryPoint], train_ratio=DEFAULT_TRAIN_RATIO,
                    seed=0) -> SplitResult:
    """Seeded random train/test partition with ``round(ratio * N)`` training points.

    Both subsets keep the input order. The training size is kept within
    ``1..N-1`` so neither side comes out empty.
    """
    if not 0 < train_ratio < 1:
        raise ValueError(f"train_ratio must lie in (0, 1), got {train_ratio}")
    n = len(points)
    if n < 2:
        raise ValueError("need at least 2 inventory points to split")
    n_train = min(max(math.floor(train_ratio * n + 0.5), 1), n - 1)
    rng = np.random.default_rng(seed)
    chosen = np.zeros(n, dtype=bool)
    chosen[rng.permutation(n)[:n_train]] = True
    train = [p for p, c in zip(points, chosen) if c]
    test = [p for p, c in zip(points, chosen) if not c]
    return SplitResult(train, test, seed, train_ratio)


@dataclass(frozen=True)
class RateCurve:
    """Cumulative (area fraction, landslide fraction) points from (0,0) to (1,1)."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError("curve x and y must be 1-D and equally long")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def points(self):
        return list(zip(self.x.tolist(), self.y.tolist()))

    def __len__(self):
        return self.x.size


def success_rate_curve(lsi: Grid, inventory: Grid, bins=DEFAULT_BINS) -> RateCurve:
    """Share of landslide cells captured versus share of area, most susceptible first.

    Cells are ranked by LSI (descending, ties by cell index). At each of
    ``bins`` equal-area rank positions the LSI value there becomes a
    threshold, and the point records the fractions of domain cells and of
    landslide cells with LSI at or above it. Repeated points are dropped.
    """
    if bins < 1:
        raise ValueError("bins must be positive")
    align_check([lsi, inventory])
    domain = lsi.valid.ravel()
    vals = lsi.values.ravel()[domain]
    slide = (inventory.valid & (inventory.values != 0)).ravel()[domain]
    n = vals.size
    n_slide = int(slide.sum())
    if n_slide == 0:
        raise ValueError("no inventory cells inside the LSI domain")
    order = np.lexsort((np.arange(n), -vals))
    ranked = vals[order]
    captured = np.cumsum(slide[order])
    # cells at or above the threshold ranked[k]: everything up to the last tie
    last_tie = np.searchsorted(-ranked, -ranked, side="right") - 1
    xs, ys = [0.0], [0.0]
    for b in range(1, bins + 1):
        k = -(-b * n // bins) - 1
        j = last_tie[k]
        xs.append((j + 1) / n)
        ys.append(captured[j] / n_slide)
    x, y = [xs[0]], [ys[0]]
    for px, py in zip(xs[1:], ys[1:]):
        if px != x[-1] or py != y[-1]:
            x.append(px)
            y.append(py)
    return RateCurve(np.array(x), np.array(y))


def auc(curve: RateCurve) -> float:
    """Area under the curve: sum of dx * y_i - dx * dy / 2 over consecutive points."""
    if len(curve) < 2:
        raise ValueError("AUC needs at least 2 curve points")
    dx = np.diff(curve.x)
    dy = np.diff(curve.y)
    return float(np.sum(dx * curve.y[1:] - dx * dy / 2.0))


def auc_band(value: float) -> str:
    """Model-quality rubric for an AUC value."""
    if value >= 0.9:
        return "very good"
    if value >= 0.8:
        return "good"
    if value >= 0.7:
        return "reasonable"
    if value >= 0.6:
        return "fair"
    return "poor"


def write_curve_csv(curve: RateCurve, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y"])
        for x, y in curve.points():
            w.writerow([fmt6(x), fmt6(y)])
