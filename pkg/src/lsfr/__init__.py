"""Frequency-ratio landslide susceptibility mapping on raster grids."""

from .classify import ClassBreaks, equal_interval_breaks, jenks_breaks, reclassify
from .fr import (area_report, class_stats, fr_raster, frequency_ratio, lsi,
                 rasterize_inventory, zonate)
from .raster import GeoRef, Grid, align_check, read_ascii_grid, write_ascii_grid
from .validation import auc, split_inventory, success_rate_curve

__version__ = "0.1.0"
