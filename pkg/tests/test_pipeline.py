import shutil
import time

import pytest
import yaml

from lsfr import pipeline
from lsfr.pipeline import (ConfigError, PipelineError, config_from_dict, load_config,
                           run_pipeline)
from lsfr.synthetic import CONFIG, write_synthetic

EXPECTED = {
    "class_breaks.csv", "fr_tables.csv", "inventory_train.csv", "inventory_test.csv",
    "lsi.asc", "zones.asc", "zone_area.csv", "success_curve.csv", "prediction_curve.csv",
    "dem.png", "lsi.png", "zones.png", "run_report.txt",
}


@pytest.fixture(scope="module")
def synthetic(tmp_path_factory):
    return write_synthetic(tmp_path_factory.mktemp("syn"))


def run(config_path, out, workers=None):
    cfg = load_config(config_path)
    cfg.output_dir = out
    if workers is not None:
        cfg.workers = workers
    return run_pipeline(cfg)


def snapshot(folder):
    return {p.relative_to(folder).as_posix(): p.read_bytes()
            for p in sorted(folder.rglob("*")) if p.is_file()}


@pytest.fixture(scope="module")
def first_run(synthetic, tmp_path_factory):
    out = tmp_path_factory.mktemp("run1")
    t0 = time.perf_counter()
    res = run(synthetic, out)
    return res, time.perf_counter() - t0


def test_writes_every_artifact(first_run):
    res, _ = first_run
    names = {p.name for p in res.output_dir.iterdir()}
    assert EXPECTED <= names
    assert not (res.output_dir / pipeline.INCOMPLETE_MARKER).exists()
    assert len(list((res.output_dir / "fr").glob("*.csv"))) == 13
    assert len(list((res.output_dir / "classes").glob("*.asc"))) == 13


def test_synthetic_run_is_fast_and_informative(first_run):
    res, seconds = first_run
    assert seconds < 5.0
    assert res.success_auc > 0.8 and res.prediction_auc > 0.8
    report = (res.output_dir / "run_report.txt").read_text()
    assert "Prediction-rate AUC" in report and "Factors (13)" in report


def test_zones_cover_lsi_domain(first_run):
    res, _ = first_run
    assert (res.zones.valid == res.lsi.valid).all()
    assert sum(a.area_pct for a in res.areas) == pytest.approx(100.0)


def test_byte_identical_across_runs_and_workers(first_run, synthetic, tmp_path):
    res, _ = first_run
    ref = snapshot(res.output_dir)
    run(synthetic, tmp_path / "again")
    run(synthetic, tmp_path / "w4", workers=4)
    assert snapshot(tmp_path / "again") == ref
    assert snapshot(tmp_path / "w4") == ref


def test_manual_zonation(synthetic, tmp_path):
    raw = yaml.safe_load(CONFIG)
    raw["zonation"] = {"method": "manual", "uppers": [12, 13, 14, 15, 1e9]}
    cfg = config_from_dict(raw, base=synthetic.parent)
    cfg.output_dir = tmp_path / "manual"
    res = run_pipeline(cfg)
    assert res.zones.values[res.zones.valid].max() <= 5


def base_config():
    return yaml.safe_load(CONFIG)


@pytest.mark.parametrize("edit, match", [
    (lambda c: c.pop("dem"), "missing required field 'dem'"),
    (lambda c: c.pop("inventory"), "inventory"),
    (lambda c: c["factors"].append(dict(c["factors"][0])), "duplicate factor name 'slope'"),
    (lambda c: c["factors"][0].update(source="derived(bogus)"), "unknown derived operation"),
    (lambda c: c["factors"][0].update(source="slope.asc"), "derived"),
    (lambda c: c["factors"][0].update(kind="ordinal"), "kind"),
    (lambda c: c.pop("dem_old"), "cut_fill"),
    (lambda c: c.update(factors=[]), "no factors"),
])
def test_config_errors(edit, match, tmp_path):
    raw = base_config()
    edit(raw)
    with pytest.raises(ConfigError, match=match):
        config_from_dict(raw, base=tmp_path)


def test_stage_error_flags_partial_output(synthetic, tmp_path):
    folder = tmp_path / "data"
    shutil.copytree(synthetic.parent, folder)
    (folder / "rainfall.asc").write_text("ncols 1\n")
    cfg = load_config(folder / synthetic.name)
    cfg.output_dir = tmp_path / "out"
    with pytest.raises(PipelineError) as info:
        run_pipeline(cfg)
    assert info.value.stage == "derive"
    marker = cfg.output_dir / pipeline.INCOMPLETE_MARKER
    assert "derive" in marker.read_text()


def test_bundled_config_matches_generator():
    from lsfr.synthetic import bundled_dir

    assert (bundled_dir() / "pipeline.yaml").read_text() == CONFIG


def test_intermediate_rasters_can_be_skipped(synthetic, tmp_path, first_run):
    raw = yaml.safe_load(CONFIG)
    raw["outputs"] = {"factor_rasters": False, "fr_rasters": False}
    cfg = config_from_dict(raw, base=synthetic.parent)
    cfg.output_dir = tmp_path / "lean"
    run_pipeline(cfg)
    assert not (cfg.output_dir / "factors").exists()
    assert not list((cfg.output_dir / "fr").glob("*.asc"))
    full = first_run[0].output_dir
    for name in ("lsi.asc", "zones.asc", "fr_tables.csv", "success_curve.csv"):
        assert (cfg.output_dir / name).read_bytes() == (full / name).read_bytes()
