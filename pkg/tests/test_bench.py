import csv
import io
import math

import numpy as np
import pytest

from oils.bench import (
    ExperimentConfig,
    augmented_x0,
    run_grid,
    run_table1,
    run_table3,
    run_table4,
    run_table5,
    subsquare_x0,
    trial_rngs,
)
from oils.generate import generate_random_system
from oils.hull import exact_hull
from oils.square import Status
from oils.subsquares import Budget, simple_solve


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(3, 4)
    with pytest.raises(ValueError):
        ExperimentConfig(4, 3, radius=-1)
    with pytest.raises(ValueError):
        ExperimentConfig(4, 3, trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig(4, 3, mode="magic")


def test_table1_ratios_at_least_one():
    res = run_table1(ExperimentConfig(5, 3, trials=5, seed=2))
    row = res.rows[0]
    assert row["counted"] == 5
    assert all(t["w_ratio"] >= 1 - 1e-9 for t in res.trials)
    assert 1 - 1e-9 <= row["av_w_ratio"] <= 1.05


def test_table1_square_case():
    res = run_table1(ExperimentConfig(3, 3, radius=0.05, trials=3, seed=0))
    assert all(t["w_ratio"] >= 1 - 1e-9 for t in res.trials)


def test_table1_reports_cap():
    res = run_table1(ExperimentConfig(12, 11, trials=1))
    assert "DimensionCap" in res.rows[0]["error"]


def test_table3_detection_and_undetected_rows():
    row = run_table3(ExperimentConfig(15, 10, radius=0.001, trials=5, seed=1)).rows[0]
    assert row["detected"] == 5 and row["undetected"] == 0
    assert 2 <= row["mean_subsquares"] <= 3
    # a tiny budget cannot reveal anything: reported rather than hidden
    row = run_table3(ExperimentConfig(15, 10, radius=0.5, trials=3, budget=Budget.random(1))).rows[0]
    assert row["undetected"] == 3 and math.isnan(row["mean_subsquares"])


def test_planted_system_never_detected():
    for seed in range(5):
        g = generate_random_system(15, 10, 0.001, np.random.default_rng(seed))
        out = simple_solve(g.A, g.b, Budget.random(30), rng=np.random.default_rng(seed))
        assert out.status is not Status.PROVEN_UNSOLVABLE


def test_table4_ratios():
    res = run_table4(ExperimentConfig(15, 10, radius=0.25, trials=3, redraws=4, seed=0))
    row = res.rows[0]
    assert row["systems"] == 3
    assert row["max_ratio"] <= 1
    assert row["av_best_ratio"] <= row["av_ratio"]
    assert row["t_subsq"] >= 0


def test_table5_radius_zero_collapses():
    res = run_table5(ExperimentConfig(8, 4, radius=0.0, trials=2, redraws=1, seed=0))
    assert res.rows[0]["centered"] is True
    # both boxes are already near points, so only the widths are meaningful
    for t in res.trials:
        assert t["x0_width"] < 1e-8
        assert all(r * t["x0_width"] < 1e-8 for r in t["ratios"])


def test_x0_sources_are_sound():
    for seed in range(5):
        g = generate_random_system(8, 3, 0.2, np.random.default_rng(seed))
        hull = exact_hull(g.A, g.b).padded()
        for X0 in (augmented_x0(g.A, g.b), subsquare_x0(g.A, g.b, np.random.default_rng(0))):
            assert X0 is not None
            assert hull.issubset(X0)


def test_determinism_and_csv():
    cfg = ExperimentConfig(6, 3, radius=0.1, trials=3, seed=9, redraws=2)
    a = run_grid(run_table4, [cfg, ExperimentConfig(8, 4, trials=2, seed=9)])
    b = run_grid(run_table4, [cfg, ExperimentConfig(8, 4, trials=2, seed=9)])
    for ra, rb in zip(a.rows, b.rows):
        assert {k: v for k, v in ra.items() if not k.startswith("t_")} == {
            k: v for k, v in rb.items() if not k.startswith("t_")
        }
    rows = list(csv.DictReader(io.StringIO(a.to_csv())))
    assert len(rows) == 2
    for row in rows:
        # enough to regenerate the row
        for key in ("seed", "m", "n", "radius", "overlap", "trials", "eps", "max_iter", "centered", "x0_source"):
            assert row[key] != ""


def test_trial_streams_independent():
    g1, s1 = trial_rngs(5, 0)
    g2, s2 = trial_rngs(5, 1)
    assert g1.random() != g2.random()
    assert trial_rngs(5, 0)[1].random() == s1.random()
