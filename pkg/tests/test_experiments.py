import numpy as np
import pytest

from hypermatch.constructions import threshold_exact
from hypermatch.experiments import (
    SweepRow,
    random_min_degree_hypergraph,
    sweep_to_csv,
    threshold_sweep,
    verify_thresholds,
)
from hypermatch.hypergraph import min_l_degree


@pytest.mark.parametrize("n,target", [(4, 0), (4, 5), (6, 20), (7, 49), (9, 40)])
def test_random_hypergraph_meets_target(n, target):
    H = random_min_degree_hypergraph(n, target, np.random.default_rng(target))
    assert min_l_degree(H, 1) >= target
    assert H.class_sizes == (n, n, n)


def test_random_hypergraph_rejects_target():
    with pytest.raises(ValueError):
        random_min_degree_hypergraph(3, 10, np.random.default_rng(0))


def test_sweep_extremes():
    full = threshold_sweep(9, 3, [81], seed=1)
    assert full[0].pm_found == 3
    empty = threshold_sweep(9, 3, [0], seed=1)
    assert empty[0].pm_found == 0


def test_sweep_reproducible():
    a = threshold_sweep(6, 6, [10, 14, 18], seed=7)
    b = threshold_sweep(6, 6, [10, 14, 18], seed=7)
    assert sweep_to_csv(a, with_time=False) == sweep_to_csv(b, with_time=False)
    assert [r.pm_found for r in a] == [r.pm_found for r in b]


def test_sweep_monotone_after_smoothing():
    grid = list(range(threshold_exact(6).value - 6, threshold_exact(6).value + 5, 2))
    rows = threshold_sweep(6, 50, grid, seed=42)
    found = [r.pm_found for r in rows]
    smooth = [sum(found[max(0, i - 1): i + 2]) / len(found[max(0, i - 1): i + 2]) for i in range(len(found))]
    assert all(b >= a - 1e-9 for a, b in zip(smooth, smooth[1:]))
    # at or above the threshold every instance has a perfect matching
    assert all(r.pm_found == r.trials for r in rows if r.delta1 >= threshold_exact(6).value)


def test_sweep_rejections():
    with pytest.raises(ValueError):
        threshold_sweep(4, 1, [17])
    with pytest.raises(ValueError):
        threshold_sweep(4, 0, [1])
    with pytest.raises(ValueError):
        threshold_sweep(99, 1, [1])


def test_sweep_csv_layout():
    rows = [SweepRow(5, 10, 4, 3, 0.125)]
    assert sweep_to_csv(rows) == "n,delta1,trials,pm_found,mean_time\n5,10,4,3,0.125000\n"
    assert sweep_to_csv(rows, with_time=False) == "n,delta1,trials,pm_found\n5,10,4,3\n"


def test_verify_thresholds_battery():
    rep = verify_thresholds(14)
    assert rep["all_pass"] and rep["version"] == 1
    rows = {r["n"]: r for r in rep["rows"]}
    assert rows[5]["construction"] == "Hstar" and rows[5]["measured_delta1"] == 10 == rows[5]["threshold"]
    assert rows[6]["construction"] == "Hk" and rows[6]["measured_delta1"] == 16 == rows[6]["threshold"]
    assert all(r["no_perfect_matching"] for r in rep["rows"])


def test_verify_thresholds_formula_only_rows():
    rep = verify_thresholds(20, oracle_max=8, build_max=12)
    rows = {r["n"]: r for r in rep["rows"]}
    assert rows[20]["measured_delta1"] is None and rows[20]["formula_ok"]
    assert rows[10]["no_perfect_matching"] is None
    with pytest.raises(ValueError):
        verify_thresholds(2)
