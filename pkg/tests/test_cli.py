import csv
import subprocess
import sys

import numpy as np
import pytest

from lsfr.cli import EXIT_DATA, EXIT_IO, EXIT_OK, EXIT_USAGE, main
from lsfr.raster import CATEGORICAL, read_ascii_grid, write_ascii_grid
from lsfr.synthetic import write_synthetic

from conftest import grid, surface


@pytest.fixture(scope="module")
def run_dir(tmp_path_factory):
    data = write_synthetic(tmp_path_factory.mktemp("data"))
    out = tmp_path_factory.mktemp("out")
    assert main(["run", "--config", str(data), "--output-dir", str(out)]) == EXIT_OK
    return data.parent, out


def fr_rows(path):
    with open(path) as fh:
        return [{k: v for k, v in r.items() if k != "class_label"} for r in csv.DictReader(fh)]


def test_derive_slope(tmp_path):
    dem = surface(lambda x, y: 0.5 * x, cell_size=10.0)
    write_ascii_grid(dem, tmp_path / "dem.asc")
    rc = main(["derive", "--op", "slope", "--dem", str(tmp_path / "dem.asc"),
               "--out", str(tmp_path / "slope.asc")])
    assert rc == EXIT_OK
    s = read_ascii_grid(tmp_path / "slope.asc").values
    np.testing.assert_allclose(s[1:-1, 1:-1], np.degrees(np.arctan(0.5)), atol=1e-9)


def test_distance_and_density(tmp_path):
    m = np.zeros((5, 5), dtype=int)
    m[2, :] = 1
    write_ascii_grid(grid(m, cell_size=30.0, kind=CATEGORICAL, nodata=-9999), tmp_path / "s.asc")
    assert main(["distance", "--sources", str(tmp_path / "s.asc"),
                 "--out", str(tmp_path / "d.asc")]) == EXIT_OK
    assert read_ascii_grid(tmp_path / "d.asc").values[0, 0] == 60.0
    assert main(["density", "--streams", str(tmp_path / "s.asc"), "--radius", "30", "--km",
                 "--out", str(tmp_path / "dd.asc")]) == EXIT_OK
    assert read_ascii_grid(tmp_path / "dd.asc").values[2, 2] == pytest.approx(1000 * 90 / 8100)


def test_subcommands_reproduce_pipeline(run_dir, tmp_path, capsys):
    data, out = run_dir
    train = str(out / "inventory_train.csv")
    # slope: classify the derived factor, then FR against the training points
    assert main(["classify", "--in", str(out / "factors" / "slope.asc"), "--method", "jenks",
                 "--k", "5", "--out", str(tmp_path / "slope_cls.asc")]) == EXIT_OK
    assert (tmp_path / "slope_cls.asc").read_bytes() == (out / "classes" / "slope.asc").read_bytes()
    assert main(["fr", "--classes", str(tmp_path / "slope_cls.asc"), "--inventory", train,
                 "--factor", "slope", "--k", "5", "--out", str(tmp_path / "slope_fr.csv"),
                 "--fr-raster", str(tmp_path / "slope_fr.asc")]) == EXIT_OK
    assert fr_rows(tmp_path / "slope_fr.csv") == fr_rows(out / "fr" / "slope.csv")
    assert (tmp_path / "slope_fr.asc").read_bytes() == (out / "fr" / "slope.asc").read_bytes()

    fr_files = [str(out / "fr" / f"{name}.asc") for name in (
        "slope", "elevation", "aspect", "curvature", "spi", "twi", "drainage_distance",
        "drainage_density", "road_distance", "rainfall", "land_use", "cut_fill", "ndvi")]
    assert main(["lsi", "--inputs", *fr_files, "--out", str(tmp_path / "lsi.asc")]) == EXIT_OK
    assert (tmp_path / "lsi.asc").read_bytes() == (out / "lsi.asc").read_bytes()

    assert main(["zonate", "--lsi", str(tmp_path / "lsi.asc"), "--out", str(tmp_path / "z.asc"),
                 "--area-out", str(tmp_path / "area.csv")]) == EXIT_OK
    assert (tmp_path / "z.asc").read_bytes() == (out / "zones.asc").read_bytes()
    assert (tmp_path / "area.csv").read_bytes() == (out / "zone_area.csv").read_bytes()

    capsys.readouterr()
    assert main(["validate", "--lsi", str(tmp_path / "lsi.asc"), "--inventory",
                 str(out / "inventory_test.csv"), "--bins", "100",
                 "--out", str(tmp_path / "curve.csv")]) == EXIT_OK
    assert capsys.readouterr().out.startswith("AUC ")
    assert (tmp_path / "curve.csv").read_bytes() == (out / "prediction_curve.csv").read_bytes()


def test_render_and_report(run_dir, tmp_path, capsys):
    _, out = run_dir
    assert main(["render", "--grid", str(out / "lsi.asc"), "--out", str(tmp_path / "l.png")]) == 0
    assert (tmp_path / "l.png").read_bytes()[:4] == b"\x89PNG"
    capsys.readouterr()
    assert main(["report", "--zones", str(out / "zones.asc")]) == EXIT_OK
    assert len(capsys.readouterr().out.splitlines()) == 5


def test_exit_codes(tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        main(["derive"])
    assert info.value.code == EXIT_USAGE
    assert main(["derive", "--op", "slope", "--out", str(tmp_path / "x.asc")]) == EXIT_USAGE
    assert main(["run", "--config", str(tmp_path / "missing.yaml")]) == EXIT_IO
    assert main(["derive", "--op", "slope", "--dem", str(tmp_path / "none.asc"),
                 "--out", str(tmp_path / "x.asc")]) == EXIT_IO
    (tmp_path / "bad.asc").write_text("ncols 1\nnrows 1\n")
    assert main(["derive", "--op", "slope", "--dem", str(tmp_path / "bad.asc"),
                 "--out", str(tmp_path / "x.asc")]) == EXIT_DATA
    (tmp_path / "cfg.yaml").write_text("factors: []\n")
    assert main(["run", "--config", str(tmp_path / "cfg.yaml")]) == EXIT_DATA
    capsys.readouterr()


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "lsfr.cli", "synthetic", "--out",
                           str(tmp_path / "syn")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert (tmp_path / "syn" / "pipeline.yaml").exists()
