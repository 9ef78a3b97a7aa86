"""Config-driven frequency-ratio workflow.

derive factors -> classify -> split inventory -> FR tables (training points)
-> FR rasters -> LSI -> zones -> area report -> success / prediction curves.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import classify as cl
from . import fr as frm
from . import hydro, terrain
from .parallel import default_workers
from .raster import (CATEGORICAL, CONTINUOUS, RAMPS, Grid, align_check, read_ascii_grid,
                     render_png, write_ascii_grid)
from .validation import (DEFAULT_BINS, DEFAULT_TRAIN_RATIO, auc, auc_band, split_inventory,
                         success_rate_curve, write_curve_csv)

log = logging.getLogger(__name__)

DERIVED_OPS = (
    "elevation", "slope", "aspect", "curvature", "flow_accumulation", "spi", "twi",
    "drainage_distance", "drainage_density", "road_distance", "ndvi", "cut_fill",
)
_REQUIRES = {
    "road_distance": ("inputs.roads",),
    "ndvi": ("inputs.ir", "inputs.red"),
    "cut_fill": ("dem_old",),
}
_SOURCE = re.compile(r"^\s*(derived|file)\((.+)\)\s*$")
INCOMPLETE_MARKER = "INCOMPLETE"


class ConfigError(ValueError):
    """Invalid pipeline configuration."""


class PipelineError(RuntimeError):
    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class FactorSpec:
    name: str
    source: str          # "derived" or "file"
    target: str          # operation name or path
    kind: str = CONTINUOUS
    classification: dict = field(default_factory=lambda: {"method": cl.JENKS, "k": 5})


@dataclass
class PipelineConfig:
    dem: Path
    output_dir: Path
    factors: list
    inventory_points: Path | None = None
    inventory_mask: Path | None = None
    dem_old: Path | None = None
    inputs: dict = field(default_factory=dict)
    stream_threshold: float = 25.0
    density_radius: float = 150.0
    cut_fill_tau: float = 0.0
    zonation: dict = field(default_factory=lambda: {"method": cl.JENKS, "k": 5})
    train_ratio: float = DEFAULT_TRAIN_RATIO
    seed: int = 0
    bins: int = DEFAULT_BINS
    workers: int = 1
    factor_rasters: bool = True
    fr_rasters: bool = True


def _path(base, value, name):
    if value is None:
        return None
    if not isinstance(value, str) or not value:
        raise ConfigError(f"'{name}' must be a file path")
    p = Path(value)
    return p if p.is_absolute() else base / p


def load_config(path) -> PipelineConfig:
    """Parse a YAML pipeline config; relative paths resolve against its folder."""
    path = Path(path)
    raw = yaml.safe_load(path.read_text())
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config must be a mapping")
    return config_from_dict(raw, path.parent)


def config_from_dict(raw: dict, base=Path(".")) -> PipelineConfig:
    base = Path(base)
    if not raw.get("dem"):
        raise ConfigError("missing required field 'dem'")
    inv = raw.get("inventory") or {}
    if not (inv.get("points") or inv.get("mask")):
        raise ConfigError("missing required field 'inventory' (points or mask)")
    if inv.get("points") and inv.get("mask"):
        raise ConfigError("'inventory' takes either points or mask, not both")
    inputs = {k: _path(base, v, f"inputs.{k}") for k, v in (raw.get("inputs") or {}).items()}

    factors = []
    seen = set()
    for i, f in enumerate(raw.get("factors") or []):
        name = f.get("name")
        if not name:
            raise ConfigError(f"factor #{i + 1} has no name")
        if name in seen:
            raise ConfigError(f"duplicate factor name '{name}'")
        seen.add(name)
        m = _SOURCE.match(str(f.get("source", "")))
        if not m:
            raise ConfigError(f"factor '{name}': source must be derived(<op>) or file(<path>)")
        source, target = m.group(1), m.group(2).strip()
        if source == "derived" and target not in DERIVED_OPS:
            raise ConfigError(f"factor '{name}': unknown derived operation '{target}'")
        if source == "file":
            target = str(_path(base, target, f"factors.{name}.source"))
        kind = f.get("kind", CATEGORICAL if target == "cut_fill" else CONTINUOUS)
        if kind not in (CONTINUOUS, CATEGORICAL):
            raise ConfigError(f"factor '{name}': kind must be continuous or categorical")
        classification = dict(f.get("classification") or {})
        classification.setdefault("method", cl.CATEGORY if kind == CATEGORICAL else cl.JENKS)
        if classification["method"] not in cl.METHODS:
            raise ConfigError(f"factor '{name}': unknown classification method "
                              f"'{classification['method']}'")
        factors.append(FactorSpec(name, source, target, kind, classification))
    if not factors:
        raise ConfigError("config lists no factors")

    cfg = PipelineConfig(
        dem=_path(base, raw["dem"], "dem"),
        output_dir=_path(base, raw.get("output_dir", "out"), "output_dir"),
        factors=factors,
        inventory_points=_path(base, inv.get("points"), "inventory.points"),
        inventory_mask=_path(base, inv.get("mask"), "inventory.mask"),
        dem_old=_path(base, raw.get("dem_old"), "dem_old"),
        inputs=inputs,
        stream_threshold=float((raw.get("streams") or {}).get("threshold", 25)),
        density_radius=float((raw.get("density") or {}).get("radius", 150)),
        cut_fill_tau=float((raw.get("cut_fill") or {}).get("tau", 0.0)),
        zonation=dict(raw.get("zonation") or {"method": cl.JENKS, "k": 5}),
        train_ratio=float((raw.get("validation") or {}).get("train_ratio", DEFAULT_TRAIN_RATIO)),
        seed=int((raw.get("validation") or {}).get("seed", 0)),
        bins=int((raw.get("validation") or {}).get("bins", DEFAULT_BINS)),
        workers=int(raw.get("workers", default_workers())),
        factor_rasters=bool((raw.get("outputs") or {}).get("factor_rasters", True)),
        fr_rasters=bool((raw.get("outputs") or {}).get("fr_rasters", True)),
    )
    for f in cfg.factors:
        for need in _REQUIRES.get(f.target if f.source == "derived" else "", ()):
            present = (cfg.dem_old if need == "dem_old"
                       else cfg.inputs.get(need.split(".", 1)[1]))
            if present is None:
                raise ConfigError(f"factor '{f.name}' needs '{need}'")
    if cfg.zonation.get("method") not in (cl.JENKS, cl.MANUAL):
        raise ConfigError("zonation method must be jenks or manual")
    return cfg


# --------------------------------------------------------------------------

class _Derivations:
    """Lazily computed terrain and hydrology layers shared between factors."""

    def __init__(self, cfg: PipelineConfig, dem: Grid, extra: dict):
        self.cfg = cfg
        self.dem = dem
        self.extra = extra
        self.cache = {}

    def get(self, op):
        if op not in self.cache:
            self.cache[op] = getattr(self, "_" + op)()
        return self.cache[op]

    def _elevation(self):
        return self.dem

    def _slope(self):
        return terrain.slope_degrees(self.dem, self.cfg.workers)

    def _aspect(self):
        return terrain.aspect_degrees(self.dem, self.cfg.workers)

    def _curvature(self):
        return terrain.curvature(self.dem, self.cfg.workers)

    def _flow_direction(self):
        return terrain.flow_direction_d8(self.dem, self.cfg.workers)

    def _flow_accumulation(self):
        return terrain.flow_accumulation(self.get("flow_direction"))

    def _spi(self):
        return terrain.spi(self.get("flow_accumulation"), self.get("slope"))

    def _twi(self):
        return terrain.twi(self.get("flow_accumulation"), self.get("slope"))

    def _streams(self):
        return hydro.extract_streams(self.get("flow_accumulation"), self.cfg.stream_threshold)

    def _drainage_distance(self):
        return hydro.euclidean_distance(self.get("streams"))

    def _drainage_density(self):
        # km of channel per km^2 for metre grids
        dd = hydro.drainage_density(self.get("streams"), self.cfg.density_radius)
        return dd.with_values(np.where(dd.valid, dd.values * 1000.0, dd.nodata))

    def _road_distance(self):
        return hydro.euclidean_distance(self.extra["roads"])

    def _ndvi(self):
        return terrain.ndvi(self.extra["ir"], self.extra["red"])

    def _cut_fill(self):
        res = terrain.cut_fill(self.extra["dem_old"], self.dem, self.cfg.cut_fill_tau)
        self.cache["cut_fill_volumes"] = (res.cut_volume, res.fill_volume)
        return res.classes


def breaks_for(grid: Grid, classification: dict) -> cl.ClassBreaks:
    """Class breaks for a factor grid from its classification block."""
    method = classification["method"]
    vals = grid.values[grid.valid]
    if method == cl.CATEGORY:
        return cl.ClassBreaks(cl.CATEGORY, tuple(np.unique(vals).tolist()))
    if method == cl.MANUAL:
        return cl.ClassBreaks(cl.MANUAL, tuple(float(u) for u in classification["uppers"]))
    k = int(classification.get("k", 5))
    if method == cl.EQUAL_INTERVAL:
        lo = float(classification.get("min", vals.min()))
        hi = float(classification.get("max", vals.max()))
        return cl.equal_interval_breaks(lo, hi, k)
    return cl.jenks_breaks(vals, k, seed=int(classification.get("seed", 0)))


def _class_labels(grid, breaks):
    if breaks.method == cl.CATEGORY:
        return {int(u): cl._fmt(u) for u in breaks.uppers}
    vals = grid.values[grid.valid]
    lower = float(vals.min()) if vals.size else None
    return dict(enumerate(breaks.labels(lower), start=1))


@dataclass
class RunResult:
    output_dir: Path
    tables: list
    lsi: Grid
    zones: Grid
    areas: list
    success_auc: float
    prediction_auc: float
    files: list


def run_pipeline(cfg: PipelineConfig) -> RunResult:
    """Execute the whole workflow and write every artifact to ``cfg.output_dir``.

    Any failure raises ``PipelineError`` naming the stage, and leaves an
    ``INCOMPLETE`` marker in the output folder.
    """
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    marker = out / INCOMPLETE_MARKER
    marker.write_text("run in progress\n")
    files = []
    stage = "load"

    def emit(path):
        files.append(path)
        return path

    try:
        dem = read_ascii_grid(cfg.dem)
        extra = {}
        if cfg.dem_old:
            extra["dem_old"] = read_ascii_grid(cfg.dem_old)
        for key, p in cfg.inputs.items():
            kind = CATEGORICAL if key == "roads" else CONTINUOUS
            extra[key] = read_ascii_grid(p, kind=kind)
        align_check([dem, *extra.values()])

        stage = "derive"
        deriv = _Derivations(cfg, dem, extra)
        factor_grids = {}
        for f in cfg.factors:
            if f.source == "derived":
                g = deriv.get(f.target)
            else:
                g = read_ascii_grid(f.target, kind=f.kind)
                align_check([dem, g])
            factor_grids[f.name] = g
        if cfg.factor_rasters:
            (out / "factors").mkdir(exist_ok=True)
            for name, g in factor_grids.items():
                write_ascii_grid(g, emit(out / "factors" / f"{name}.asc"))

        stage = "classify"
        class_grids, breaks, labels = {}, {}, {}
        for f in cfg.factors:
            g = factor_grids[f.name]
            b = breaks_for(g, f.classification)
            breaks[f.name] = b
            class_grids[f.name] = cl.reclassify(g, b, cfg.workers)
            labels[f.name] = _class_labels(g, b)
        (out / "classes").mkdir(exist_ok=True)
        for name, g in class_grids.items():
            write_ascii_grid(g, emit(out / "classes" / f"{name}.asc"))
        _write_breaks(breaks, emit(out / "class_breaks.csv"))

        stage = "inventory"
        if cfg.inventory_points:
            points = frm.read_inventory_csv(cfg.inventory_points)
        else:
            points = frm.mask_to_points(read_ascii_grid(cfg.inventory_mask, kind=CATEGORICAL))
        split = split_inventory(points, cfg.train_ratio, cfg.seed)
        frm.write_inventory_csv(split.train, emit(out / "inventory_train.csv"))
        frm.write_inventory_csv(split.test, emit(out / "inventory_test.csv"))
        train_mask, train_skipped = frm.rasterize_inventory(split.train, dem.georef)
        test_mask, test_skipped = frm.rasterize_inventory(split.test, dem.georef)

        stage = "frequency_ratio"
        tables, fr_grids = [], []
        for f in cfg.factors:
            b = breaks[f.name]
            ids = [int(u) for u in b.uppers] if b.method == cl.CATEGORY else range(1, b.k + 1)
            t = frm.class_stats(class_grids[f.name], train_mask, f.name, ids, cfg.workers)
            t = frm.frequency_ratio(t).with_labels(labels[f.name])
            tables.append(t)
            fr_grids.append(frm.fr_raster(class_grids[f.name], t))
        (out / "fr").mkdir(exist_ok=True)
        for t, g in zip(tables, fr_grids):
            if cfg.fr_rasters:
                write_ascii_grid(g, emit(out / "fr" / f"{t.factor}.asc"))
            frm.write_fr_csv([t], emit(out / "fr" / f"{t.factor}.csv"))
        frm.write_fr_csv(tables, emit(out / "fr_tables.csv"))

        stage = "lsi"
        lsi_grid = frm.lsi(fr_grids)
        write_ascii_grid(lsi_grid, emit(out / "lsi.asc"))

        stage = "zonate"
        zone_breaks = zonation_breaks(lsi_grid, cfg.zonation)
        zones = frm.zonate(lsi_grid, zone_breaks)
        write_ascii_grid(zones, emit(out / "zones.asc"))
        areas = frm.area_report(zones)
        frm.write_area_csv(areas, emit(out / "zone_area.csv"))

        stage = "validate"
        success = success_rate_curve(lsi_grid, train_mask, cfg.bins)
        prediction = success_rate_curve(lsi_grid, test_mask, cfg.bins)
        write_curve_csv(success, emit(out / "success_curve.csv"))
        write_curve_csv(prediction, emit(out / "prediction_curve.csv"))
        s_auc, p_auc = auc(success), auc(prediction)

        stage = "render"
        render_png(dem, RAMPS["terrain"], emit(out / "dem.png"))
        render_png(lsi_grid, RAMPS["susceptibility"], emit(out / "lsi.png"))
        render_png(zones, RAMPS["susceptibility"], emit(out / "zones.png"), breaks=ZONE_IDS)

        stage = "report"
        report = format_report(cfg, tables, zone_breaks, areas, s_auc, p_auc, split,
                               train_skipped + test_skipped, deriv.cache.get("cut_fill_volumes"))
        emit(out / "run_report.txt").write_text(report)
    except Exception as exc:
        marker.write_text(f"failed at stage '{stage}': {exc}\n")
        raise PipelineError(stage, exc) from exc
    marker.unlink()
    log.info("pipeline finished: %d files in %s", len(files), out)
    return RunResult(out, tables, lsi_grid, zones, areas, s_auc, p_auc, files)


ZONE_IDS = cl.ClassBreaks(cl.MANUAL, (1, 2, 3, 4, 5))


def zonation_breaks(lsi_grid: Grid, zonation: dict) -> cl.ClassBreaks:
    if zonation.get("method") == cl.MANUAL:
        uppers = tuple(float(u) for u in zonation["uppers"])
        return cl.ClassBreaks(cl.MANUAL, uppers)
    return cl.jenks_breaks(lsi_grid.values[lsi_grid.valid], int(zonation.get("k", 5)))


def _write_breaks(breaks, path):
    with open(path, "w") as fh:
        fh.write("factor,method,class_id,upper\n")
        for name, b in breaks.items():
            for i, u in enumerate(b.uppers, start=1):
                fh.write(f"{name},{b.method},{i},{frm.fmt6(u)}\n")


def format_report(cfg, tables, zone_breaks, areas, s_auc, p_auc, split, skipped,
                  volumes=None):
    lines = [
        "Frequency-ratio landslide susceptibility run",
        "=" * 44,
        f"DEM: {cfg.dem.name}",
        f"Factors ({len(tables)}): " + ", ".join(t.factor for t in tables),
        f"Inventory: {len(split.train) + len(split.test)} points "
        f"({len(split.train)} train / {len(split.test)} test, "
        f"ratio {cfg.train_ratio}, seed {cfg.seed}); {skipped} outside the grid",
        "",
        "Frequency ratios (training inventory)",
    ]
    for t in tables:
        lines.append(f"  {t.factor}: total pixels {t.total_class}, landslide pixels "
                     f"{t.total_slide}")
        for c in t.classes:
            lines.append(f"    {c.class_id:>3}  {c.label:<24} N={c.n_pix_class:<8} "
                         f"S={c.n_pix_slide:<6} FR={frm.fmt6(c.fr)}")
    if volumes is not None:
        lines += ["", f"Cut volume {frm.fmt6(volumes[0])}, fill volume {frm.fmt6(volumes[1])}"]
    lines += ["", "Susceptibility zones (LSI uppers: "
              + ", ".join(frm.fmt6(u) for u in zone_breaks.uppers) + ")"]
    for a in areas:
        lines.append(f"  {a.zone} {a.name:<10} pixels {a.pixels:<8} area {frm.fmt6(a.area_km2)} "
                     f"km2 ({frm.fmt6(a.area_pct)} %)")
    lines += [
        "",
        f"Success-rate AUC (training): {s_auc:.4f} ({auc_band(s_auc)})",
        f"Prediction-rate AUC (test):  {p_auc:.4f} ({auc_band(p_auc)})",
        "",
    ]
    return "\n".join(lines)
