import math

import pytest

from src.api.exceptions import ConfigError
from src.api.models import SystemConfig
from src.api.services.sweep import (
    SWEEP_COLUMNS,
    config_for_point,
    monte_carlo_sweep,
    pivot_table,
    table_sweep,
    trial_seed,
)
from src.api.utils.allocators import FOUR_STEP, RANDOM_ALLOCATION, run_4sa, run_ra_baseline
from src.api.utils.scenario import generate_drop


def _combined_stderr(a, b) -> float:
    return math.hypot(a.stderr, b.stderr)


def test_trial_seeds_are_pure_and_distinct():
    assert trial_seed(2020, 0, 0) == trial_seed(2020, 0, 0)
    seeds = {trial_seed(2020, i, t) for i in range(3) for t in range(50)}
    assert len(seeds) == 150
    assert trial_seed(2020, 0, 0) != trial_seed(2021, 0, 0)


def test_point_config_keeps_energy_scale(small_config):
    point = config_for_point(small_config, "N_R", 16.0)
    assert point.N_R == 16 and isinstance(point.N_R, int)
    assert point.c0 == small_config.c0
    assert config_for_point(small_config, "speed", 120).speed_kmh == 120.0


@pytest.mark.parametrize("axis, value", [("M", 4), ("p0", 1.5), ("J", -1.0)])
def test_point_config_rejects_bad_axis_or_value(small_config, axis, value):
    with pytest.raises(ConfigError):
        config_for_point(small_config, axis, value)


def test_sweep_needs_a_trial(small_config):
    with pytest.raises(ConfigError):
        monte_carlo_sweep(small_config, "J", [0.5], trials=0)


def test_single_trial_matches_direct_allocation(small_config):
    report = monte_carlo_sweep(small_config, "J", [0.5], trials=1, seed=3)
    config = config_for_point(small_config, "J", 0.5)
    drop = generate_drop(config, trial_seed(3, 0, 0))

    four_step = report.point(0.5, FOUR_STEP)
    assert four_step.mean_sum_rate == pytest.approx(run_4sa(drop, config).sum_rate)
    assert four_step.stderr == 0.0
    assert four_step.included_trials == 1
    random = report.point(0.5, RANDOM_ALLOCATION)
    assert random.mean_sum_rate == pytest.approx(run_ra_baseline(drop, config).sum_rate)
    with pytest.raises(KeyError):
        report.point(0.25, FOUR_STEP)


def test_worker_processes_do_not_change_results(small_config):
    serial = monte_carlo_sweep(small_config, "p0", [0.01, 0.1], trials=3, seed=5)
    parallel = monte_carlo_sweep(small_config, "p0", [0.01, 0.1], trials=3, seed=5, workers=2)
    assert serial.points == parallel.points


def test_infeasible_budget_excludes_every_trial(small_config):
    report = monte_carlo_sweep(small_config, "J", [1e-4, 0.5], trials=2, seed=1)
    starved = report.point(1e-4, FOUR_STEP)
    assert starved.excluded_trials == starved.trials == 2
    assert math.isnan(starved.mean_sum_rate)
    assert report.point(0.5, FOUR_STEP).excluded_trials == 0


def test_report_frame(small_config):
    report = monte_carlo_sweep(small_config, "speed", [60, 100], trials=2, seed=1)
    frame = report.to_frame()
    assert list(frame.columns) == SWEEP_COLUMNS
    assert len(frame) == 4
    assert sorted(set(frame["algorithm"])) == [FOUR_STEP, RANDOM_ALLOCATION]
    assert [p.axis_value for p in report.series(FOUR_STEP)] == [60.0, 100.0]


def test_verified_sweep_reports_outage_margin(small_config):
    report = monte_carlo_sweep(
        small_config, "J", [0.5], trials=2, seed=2, verify_outage=True, fading_trials=2000
    )
    point = report.point(0.5, FOUR_STEP)
    assert point.worst_outage_margin is not None
    assert point.worst_outage_margin < 4 * point.outage_stderr
    assert report.point(0.5, RANDOM_ALLOCATION).worst_outage_margin is None
    assert "worst_outage_margin" in report.to_frame().columns


def test_table_sweep_shares_one_energy_scale(small_config):
    reports = table_sweep(small_config, [8, 16], [0.5, 1 / 64], trials=2, seed=4)
    assert sorted(reports) == [8, 16]
    table = pivot_table(reports)
    assert list(table.columns) == [8, 16]
    assert list(table.index) == [0.5, 1 / 64]
    # drops do not depend on N_R: same drop seeds per J across the rows
    assert reports[8].seed == reports[16].seed


@pytest.mark.slow
def test_4sa_beats_random_allocation_at_every_speed():
    config = SystemConfig(trials=200)
    report = monte_carlo_sweep(config, "speed", [60, 80, 100, 120, 140])
    for speed in report.values:
        four_step = report.point(speed, FOUR_STEP)
        random = report.point(speed, RANDOM_ALLOCATION)
        assert four_step.mean_sum_rate >= random.mean_sum_rate - 2 * _combined_stderr(
            four_step, random
        )


@pytest.mark.slow
def test_sum_rate_grows_with_outage_tolerance():
    report = monte_carlo_sweep(SystemConfig(trials=200), "p0", [0.001, 0.01, 0.1])
    series = report.series(FOUR_STEP)
    for lower, higher in zip(series, series[1:]):
        assert higher.mean_sum_rate >= lower.mean_sum_rate - 3 * _combined_stderr(lower, higher)


@pytest.mark.slow
def test_sum_rate_does_not_grow_with_speed():
    report = monte_carlo_sweep(SystemConfig(trials=200), "speed", [60, 100, 140])
    series = report.series(FOUR_STEP)
    for slower, faster in zip(series, series[1:]):
        assert faster.mean_sum_rate <= slower.mean_sum_rate + 3 * _combined_stderr(slower, faster)


@pytest.mark.slow
def test_energy_budget_table_structure():
    """Kleiner budget geeft nooit meer rate; bij veel budget wint meer antennes; bij 1/64 wint N_R=16."""
    config = SystemConfig(trials=100, c0_reference_antennas=32)
    j_values = [4, 1, 1 / 4, 1 / 16, 1 / 64]
    reports = table_sweep(config, [16, 32, 64], j_values)

    for n_r, report in reports.items():
        feasible = [p for p in report.series(FOUR_STEP) if p.included_trials > 0]
        for larger, smaller in zip(feasible, feasible[1:]):
            assert smaller.mean_sum_rate <= larger.mean_sum_rate + 3 * _combined_stderr(
                larger, smaller
            )
    assert reports[64].point(1 / 64, FOUR_STEP).excluded_trials == 100

    top = {n_r: reports[n_r].point(4, FOUR_STEP) for n_r in reports}
    assert top[64].mean_sum_rate >= top[32].mean_sum_rate - 2 * _combined_stderr(top[64], top[32])
    assert top[32].mean_sum_rate >= top[16].mean_sum_rate - 2 * _combined_stderr(top[32], top[16])

    nr16 = reports[16].point(1 / 64, FOUR_STEP)
    nr32 = reports[32].point(1 / 64, FOUR_STEP)
    assert nr16.mean_sum_rate >= nr32.mean_sum_rate - 2 * _combined_stderr(nr16, nr32)
