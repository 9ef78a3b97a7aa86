"""Command-line interface: ``lsfr <subcommand>``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import classify as cl
from . import fr as frm
from . import hydro, terrain
from .parallel import WORKERS_ENV, default_workers
from .pipeline import ConfigError, PipelineError, load_config, run_pipeline
from .raster import (CATEGORICAL, CONTINUOUS, RAMPS, GridFormatError, read_ascii_grid,
                     render_png, write_ascii_grid)
from .validation import auc, auc_band, success_rate_curve, write_curve_csv

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DATA = 4

DERIVE_OPS = ("slope", "aspect", "curvature", "fill", "flow_direction", "flow_accumulation",
              "spi", "twi", "streams", "ndvi", "cut_fill")


def _read(path, kind=CONTINUOUS):
    return read_ascii_grid(path, kind=kind)


def _load_inventory(path, template):
    """Inventory as a mask on ``template``: points CSV or an ASCII mask grid."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        mask, skipped = frm.rasterize_inventory(frm.read_inventory_csv(path), template.georef)
        if skipped:
            logging.warning("%d inventory points outside the grid were skipped", skipped)
        return mask
    return _read(path, CATEGORICAL)


def cmd_derive(args):
    op = args.op
    if op == "ndvi":
        if not (args.ir and args.red):
            raise _Usage("derive --op ndvi needs --ir and --red")
        out = terrain.ndvi(_read(args.ir), _read(args.red))
        write_ascii_grid(out, args.out)
        return
    if not args.dem:
        raise _Usage(f"derive --op {op} needs --dem")
    dem = _read(args.dem)
    w = args.workers
    if op == "slope":
        out = terrain.slope_degrees(dem, w)
    elif op == "aspect":
        out = terrain.aspect_degrees(dem, w)
    elif op == "curvature":
        out = terrain.curvature(dem, w)
    elif op == "fill":
        out = terrain.fill_depressions(dem)
    elif op == "cut_fill":
        if not args.dem_old:
            raise _Usage("derive --op cut_fill needs --dem-old")
        res = terrain.cut_fill(_read(args.dem_old), dem, args.tau)
        print(f"cut_volume={res.cut_volume!r} fill_volume={res.fill_volume!r}")
        out = res.classes
    else:
        fdir = terrain.flow_direction_d8(dem, w)
        if op == "flow_direction":
            out = fdir
        else:
            acc = terrain.flow_accumulation(fdir)
            if op == "flow_accumulation":
                out = acc
            elif op == "streams":
                out = hydro.extract_streams(acc, args.threshold)
            else:
                slope = terrain.slope_degrees(dem, w)
                out = terrain.spi(acc, slope) if op == "spi" else terrain.twi(acc, slope)
    write_ascii_grid(out, args.out)


def cmd_distance(args):
    write_ascii_grid(hydro.euclidean_distance(_read(args.sources, CATEGORICAL)), args.out)


def cmd_density(args):
    dd = hydro.drainage_density(_read(args.streams, CATEGORICAL), args.radius)
    if args.km:
        dd = dd.with_values(np.where(dd.valid, dd.values * 1000.0, dd.nodata))
    write_ascii_grid(dd, args.out)


def cmd_classify(args):
    grid = _read(args.input, CATEGORICAL if args.method == cl.CATEGORY else CONTINUOUS)
    vals = grid.values[grid.valid]
    if args.method == cl.JENKS:
        breaks = cl.jenks_breaks(vals, args.k, seed=args.seed)
    elif args.method == cl.EQUAL_INTERVAL:
        lo = vals.min() if args.min is None else args.min
        hi = vals.max() if args.max is None else args.max
        breaks = cl.equal_interval_breaks(float(lo), float(hi), args.k)
    elif args.method == cl.MANUAL:
        if not args.uppers:
            raise _Usage("classify --method manual needs --uppers")
        breaks = cl.ClassBreaks(cl.MANUAL, tuple(args.uppers))
    else:
        breaks = cl.ClassBreaks(cl.CATEGORY, tuple(np.unique(vals).tolist()))
    write_ascii_grid(cl.reclassify(grid, breaks, args.workers), args.out)
    print("uppers: " + " ".join(frm.fmt6(u) for u in breaks.uppers))


def cmd_fr(args):
    classes = _read(args.classes, CATEGORICAL)
    inventory = _load_inventory(args.inventory, classes)
    ids = range(1, args.k + 1) if args.k else None
    table = frm.class_stats(classes, inventory, args.factor, ids, args.workers)
    table = frm.frequency_ratio(table)
    frm.write_fr_csv([table], args.out)
    if args.fr_raster:
        write_ascii_grid(frm.fr_raster(classes, table), args.fr_raster)


def cmd_lsi(args):
    write_ascii_grid(frm.lsi([_read(p) for p in args.inputs]), args.out)


def cmd_zonate(args):
    lsi_grid = _read(args.lsi)
    if args.uppers:
        breaks = cl.ClassBreaks(cl.MANUAL, tuple(args.uppers))
    else:
        breaks = cl.jenks_breaks(lsi_grid.values[lsi_grid.valid], 5)
    zones = frm.zonate(lsi_grid, breaks)
    write_ascii_grid(zones, args.out)
    if args.area_out:
        frm.write_area_csv(frm.area_report(zones), args.area_out)


def cmd_validate(args):
    lsi_grid = _read(args.lsi)
    curve = success_rate_curve(lsi_grid, _load_inventory(args.inventory, lsi_grid), args.bins)
    if args.out:
        write_curve_csv(curve, args.out)
    value = auc(curve)
    print(f"AUC {value:.6f} ({auc_band(value)})")


def cmd_render(args):
    kind = CATEGORICAL if args.categorical else CONTINUOUS
    grid = _read(args.grid, kind)
    breaks = cl.ClassBreaks(cl.MANUAL, tuple(args.uppers)) if args.uppers else None
    render_png(grid, RAMPS[args.ramp], args.out, breaks=breaks)


def cmd_report(args):
    rows = frm.area_report(_read(args.zones, CATEGORICAL))
    if args.out:
        frm.write_area_csv(rows, args.out)
    for r in rows:
        print(f"{r.zone} {r.name:<10} {r.pixels:>10} {r.area_km2:>12.3f} km2 {r.area_pct:>7.2f} %")


def cmd_run(args):
    cfg = load_config(args.config)
    if args.workers is not None:
        cfg.workers = args.workers
    if args.output_dir:
        cfg.output_dir = Path(args.output_dir)
    res = run_pipeline(cfg)
    print(f"wrote {len(res.files)} files to {res.output_dir}")
    print(f"success AUC {res.success_auc:.4f} ({auc_band(res.success_auc)}), "
          f"prediction AUC {res.prediction_auc:.4f} ({auc_band(res.prediction_auc)})")


def cmd_synthetic(args):
    from .synthetic import write_synthetic

    print(write_synthetic(args.out, args.size))


class _Usage(Exception):
    pass


def build_parser():
    p = argparse.ArgumentParser(prog="lsfr", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--workers", type=int, default=None,
                        help=f"row-band workers (default ${WORKERS_ENV} or 1)")
        return sp

    sp = add("derive", cmd_derive, "derive a terrain/hydrology raster")
    sp.add_argument("--op", required=True, choices=DERIVE_OPS)
    sp.add_argument("--dem")
    sp.add_argument("--dem-old")
    sp.add_argument("--tau", type=float, default=0.0)
    sp.add_argument("--ir")
    sp.add_argument("--red")
    sp.add_argument("--threshold", type=float, default=25.0)
    sp.add_argument("--out", required=True)

    sp = add("distance", cmd_distance, "Euclidean distance to source cells")
    sp.add_argument("--sources", required=True)
    sp.add_argument("--out", required=True)

    sp = add("density", cmd_density, "drainage density from a stream mask")
    sp.add_argument("--streams", required=True)
    sp.add_argument("--radius", type=float, required=True)
    sp.add_argument("--km", action="store_true", help="scale m/m^2 to km/km^2")
    sp.add_argument("--out", required=True)

    sp = add("classify", cmd_classify, "reclassify a raster into class IDs")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--method", choices=cl.METHODS, default=cl.JENKS)
    sp.add_argument("--k", type=int, default=5)
    sp.add_argument("--uppers", type=float, nargs="+")
    sp.add_argument("--min", type=float)
    sp.add_argument("--max", type=float)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)

    sp = add("fr", cmd_fr, "frequency-ratio table for one classified factor")
    sp.add_argument("--classes", required=True)
    sp.add_argument("--inventory", required=True, help="points CSV or ASCII mask grid")
    sp.add_argument("--factor", default="factor")
    sp.add_argument("--k", type=int, help="report classes 1..k even when empty")
    sp.add_argument("--fr-raster", help="also write the FR raster here")
    sp.add_argument("--out", required=True)

    sp = add("lsi", cmd_lsi, "sum FR rasters into the susceptibility index")
    sp.add_argument("--inputs", nargs="+", required=True)
    sp.add_argument("--out", required=True)

    sp = add("zonate", cmd_zonate, "five susceptibility zones from an LSI raster")
    sp.add_argument("--lsi", required=True)
    sp.add_argument("--uppers", type=float, nargs=5, help="manual zone uppers (else Jenks k=5)")
    sp.add_argument("--area-out")
    sp.add_argument("--out", required=True)

    sp = add("validate", cmd_validate, "success-rate curve and AUC")
    sp.add_argument("--lsi", required=True)
    sp.add_argument("--inventory", required=True)
    sp.add_argument("--bins", type=int, default=100)
    sp.add_argument("--out")

    sp = add("render", cmd_render, "render a raster to PNG")
    sp.add_argument("--grid", required=True)
    sp.add_argument("--ramp", choices=sorted(RAMPS), default="susceptibility")
    sp.add_argument("--uppers", type=float, nargs="+")
    sp.add_argument("--categorical", action="store_true")
    sp.add_argument("--out", required=True)

    sp = add("report", cmd_report, "zone area table")
    sp.add_argument("--zones", required=True)
    sp.add_argument("--out")

    sp = add("run", cmd_run, "run the full pipeline from a YAML config")
    sp.add_argument("--config", required=True)
    sp.add_argument("--output-dir")

    sp = add("synthetic", cmd_synthetic, "write the synthetic demo dataset")
    sp.add_argument("--size", type=int, default=64, help="rows and columns of the lattice")
    sp.add_argument("--out", required=True)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.workers is None and args.command != "run":
        args.workers = default_workers()
    try:
        args.func(args)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"lsfr: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PipelineError as exc:
        print(f"lsfr: {exc}", file=sys.stderr)
        return EXIT_IO if isinstance(exc.cause, OSError) else EXIT_DATA
    except OSError as exc:
        print(f"lsfr: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, ConfigError, GridFormatError) as exc:
        print(f"lsfr: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
