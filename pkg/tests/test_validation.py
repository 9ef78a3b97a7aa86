import numpy as np
import pytest

from lsfr.fr import InventoryPoint
from lsfr.validation import (RateCurve, auc, auc_band, split_inventory, success_rate_curve,
                             write_curve_csv)

from conftest import grid, mask_grid


def trapezoid(x, y):
    total = 0.0
    for i in range(1, len(x)):
        total += (x[i] - x[i - 1]) * (y[i] + y[i - 1]) / 2.0
    return total


def random_curve(rng):
    n = int(rng.integers(2, 60))
    x = np.concatenate([[0.0], np.sort(rng.random(n - 2)), [1.0]])
    y = np.concatenate([[0.0], np.sort(rng.random(n - 2)), [1.0]])
    return RateCurve(x, y)


POINTS = [InventoryPoint(float(i), 0.0, str(i)) for i in range(10)]


def test_split_sizes_and_determinism():
    a = split_inventory(POINTS, 0.7, seed=1)
    assert (len(a.train), len(a.test)) == (7, 3)
    assert split_inventory(POINTS, 0.7, seed=1) == a
    for seed in range(5):
        s = split_inventory(POINTS, 0.7, seed=seed)
        assert len(s.train) == 7
        assert sorted(s.train + s.test, key=lambda p: p.x) == POINTS
        assert not set(s.train) & set(s.test)


def test_split_differs_between_seeds():
    parts = {tuple(p.id for p in split_inventory(POINTS, 0.5, seed=s).train) for s in range(10)}
    assert len(parts) > 1


def test_split_errors():
    with pytest.raises(ValueError):
        split_inventory(POINTS[:1])
    with pytest.raises(ValueError):
        split_inventory(POINTS, 1.0)
    s = split_inventory(POINTS[:2], 0.9)
    assert len(s.train) == 1 and len(s.test) == 1


def test_four_cell_fixture():
    curve = success_rate_curve(grid([[4.0, 3.0, 2.0, 1.0]]), mask_grid([[1, 0, 0, 0]]), bins=4)
    assert curve.points() == [(0, 0), (0.25, 1), (0.5, 1), (0.75, 1), (1, 1)]
    assert auc(curve) == 0.875


def test_all_cells_inventory_is_diagonal():
    rng = np.random.default_rng(2)
    lsi = grid(rng.random((10, 10)))
    curve = success_rate_curve(lsi, mask_grid(np.ones((10, 10))), bins=20)
    np.testing.assert_array_equal(curve.x, curve.y)
    np.testing.assert_allclose(curve.x, np.arange(21) / 20)
    assert auc(curve) == pytest.approx(0.5, abs=1e-15)


def test_constant_lsi_single_step():
    curve = success_rate_curve(grid(np.full((4, 4), 2.0)), mask_grid(np.eye(4)), bins=10)
    assert curve.points() == [(0, 0), (1, 1)]


def test_curve_ignores_nodata_and_needs_inventory():
    lsi = grid([[5.0, -9999.0, 1.0, 2.0]])
    curve = success_rate_curve(lsi, mask_grid([[0, 1, 0, 1]]), bins=3)
    assert curve.points() == [(0, 0), (1 / 3, 0), (2 / 3, 1), (1, 1)]
    with pytest.raises(ValueError, match="no inventory"):
        success_rate_curve(lsi, mask_grid([[0, 1, 0, 0]]), bins=3)
    with pytest.raises(ValueError):
        success_rate_curve(lsi, mask_grid([[0, 0, 0, 1]]), bins=0)


def test_auc_examples():
    assert auc(RateCurve([0.0, 1.0], [0.0, 1.0])) == 0.5
    assert auc(RateCurve([0.0, 0.2, 1.0], [0.0, 1.0, 1.0])) == pytest.approx(0.9, abs=1e-15)
    with pytest.raises(ValueError):
        auc(RateCurve([0.0], [0.0]))


def test_auc_matches_trapezoid(rng):
    for _ in range(200):
        c = random_curve(rng)
        assert abs(auc(c) - trapezoid(c.x, c.y)) <= 1e-12


def test_auc_collinear_points(rng):
    for _ in range(50):
        c = random_curve(rng)
        i = int(rng.integers(1, len(c)))
        t = rng.random()
        x = np.insert(c.x, i, c.x[i - 1] + t * (c.x[i] - c.x[i - 1]))
        y = np.insert(c.y, i, c.y[i - 1] + t * (c.y[i] - c.y[i - 1]))
        assert auc(RateCurve(x, y)) == pytest.approx(auc(c), abs=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_top_cells_dominate_random_inventory(seed):
    rng = np.random.default_rng(seed)
    lsi = grid(rng.random((20, 20)))
    k = 25
    top = np.zeros(400, dtype=int)
    top[np.argsort(-lsi.values.ravel(), kind="stable")[:k]] = 1
    rand = np.zeros(400, dtype=int)
    rand[rng.choice(400, k, replace=False)] = 1
    best = auc(success_rate_curve(lsi, mask_grid(top.reshape(20, 20))))
    other = auc(success_rate_curve(lsi, mask_grid(rand.reshape(20, 20))))
    assert best >= other


def test_auc_bands():
    assert [auc_band(v) for v in (0.95, 0.9, 0.85, 0.75, 0.65, 0.5)] == \
        ["very good", "very good", "good", "reasonable", "fair", "poor"]


def test_curve_csv(tmp_path):
    write_curve_csv(RateCurve([0.0, 0.25, 1.0], [0.0, 1.0, 1.0]), tmp_path / "c.csv")
    assert (tmp_path / "c.csv").read_text() == "x,y\n0,0\n0.25,1\n1,1\n"
