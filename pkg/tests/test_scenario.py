import math

import numpy as np
import pytest

from src.api.exceptions import ConfigError, DomainError
from src.api.models import SystemConfig
from src.api.utils.scenario import (
    DEFAULT_CHANNEL,
    LinkKind,
    build_drop,
    drop_vehicles,
    generate_drop,
    slow_fading_gain,
)


def test_gain_is_one_where_path_loss_vanishes():
    distance = 10.0 ** (-DEFAULT_CHANNEL.v2v_reference_db / (10.0 * DEFAULT_CHANNEL.v2v_exponent))
    assert slow_fading_gain(distance, LinkKind.V2V, 0.0) == pytest.approx(1.0, rel=1e-12)


def test_doubling_distance_follows_log_distance_exponent():
    ratio = slow_fading_gain(200.0, LinkKind.V2V, 0.0) / slow_fading_gain(100.0, LinkKind.V2V, 0.0)
    assert ratio == pytest.approx(2.0**-DEFAULT_CHANNEL.v2v_exponent, rel=1e-12)


def test_ten_db_shadowing_divides_gain_by_ten():
    for kind in LinkKind:
        plain = slow_fading_gain(150.0, kind, 0.0)
        shadowed = slow_fading_gain(150.0, kind, 10.0)
        assert plain / shadowed == pytest.approx(10.0, rel=1e-12)


def test_v2i_path_loss_at_one_kilometre_is_the_intercept():
    assert slow_fading_gain(1000.0, LinkKind.V2I, 0.0) == pytest.approx(10.0 ** (-12.81))


@pytest.mark.parametrize("distance", [0.0, -5.0, np.array([10.0, 0.0])])
def test_non_positive_distance_raises(distance):
    with pytest.raises(DomainError):
        slow_fading_gain(distance, LinkKind.V2V, 0.0)


def test_single_link_without_shadowing_matches_path_loss():
    config = SystemConfig(M=1, K=1, v2i_shadow_db=0.0, v2v_shadow_db=0.0)
    positions = np.array([[0.0, 2.0], [100.0, 2.0], [110.0, 6.0], [500.0, 10.0]])
    drop = build_drop(config, positions, [0], [1], np.random.default_rng(0))
    assert drop.due_rx_vehicles.tolist() == [2]
    expected = slow_fading_gain(math.hypot(10.0, 4.0), LinkKind.V2V, 0.0)
    assert drop.due_gain[0] == pytest.approx(expected, rel=1e-12)


def test_same_seed_gives_identical_drop(small_config):
    first = generate_drop(small_config, 11)
    second = generate_drop(small_config, 11)
    for name in (
        "cue_bs_gain",
        "due_gain",
        "due_cross_gain",
        "cue_due_gain",
        "due_bs_gain",
        "positions",
        "due_rx_vehicles",
    ):
        assert np.array_equal(getattr(first, name), getattr(second, name))


def test_different_seeds_give_different_drops(small_config):
    assert not np.array_equal(
        generate_drop(small_config, 1).positions, generate_drop(small_config, 2).positions
    )


def test_drop_gains_and_vehicle_roles(small_config):
    drop = generate_drop(small_config, 5)
    assert (drop.M, drop.K) == (small_config.M, small_config.K)
    for gains in (drop.cue_bs_gain, drop.due_gain, drop.due_cross_gain, drop.cue_due_gain, drop.due_bs_gain):
        assert np.all(np.isfinite(gains)) and np.all(gains > 0.0)
    assert np.array_equal(np.diag(drop.due_cross_gain), drop.due_gain)
    roles = np.concatenate((drop.cue_vehicles, drop.due_tx_vehicles, drop.due_rx_vehicles))
    assert len(set(roles.tolist())) == small_config.M + 2 * small_config.K


def test_receiver_is_nearest_unused_vehicle(small_config):
    drop = generate_drop(small_config, 9)
    used = set(drop.cue_vehicles.tolist()) | set(drop.due_tx_vehicles.tolist())
    for tx, rx in zip(drop.due_tx_vehicles, drop.due_rx_vehicles):
        distance = np.linalg.norm(drop.positions - drop.positions[tx], axis=1)
        candidates = [v for v in range(len(distance)) if v not in used]
        assert distance[rx] == min(distance[v] for v in candidates)
        used.add(int(rx))


def test_lane_density_matches_headway_rule():
    config = SystemConfig()
    rng = np.random.default_rng(123)
    drops = 1000
    counts = np.array([len(drop_vehicles(config, rng)) for _ in range(drops)]) / config.lanes
    expected = config.vehicle_density * config.road_length_m
    stderr = math.sqrt(expected / (drops * config.lanes))
    assert abs(counts.mean() - expected) < 3 * stderr


def test_faster_traffic_spreads_vehicles_out():
    def mean_gap(speed_kmh: float) -> float:
        config = SystemConfig(speed_kmh=speed_kmh)
        rng = np.random.default_rng(7)
        gaps = []
        for _ in range(200):
            positions = drop_vehicles(config, rng)
            for lane_y in np.unique(positions[:, 1]):
                x = np.sort(positions[positions[:, 1] == lane_y, 0])
                gaps.extend(np.diff(x))
        return float(np.mean(gaps))

    slow, fast = mean_gap(60.0), mean_gap(140.0)
    assert fast > slow
    assert fast == pytest.approx(2.5 * 140.0 / 3.6, rel=0.1)


def test_road_too_short_raises_config_error():
    config = SystemConfig(M=10, K=30, road_length_m=10.0, max_density_retries=2)
    with pytest.raises(ConfigError):
        generate_drop(config, 1)


def test_short_road_is_extended_until_users_fit():
    config = SystemConfig(M=2, K=3, road_length_m=10.0, max_density_retries=20)
    drop = generate_drop(config, 4)
    assert drop.road_length_m > 10.0
    assert drop.bs_position[0] == pytest.approx(drop.road_length_m / 2.0)


def test_drop_exports_one_row_per_link(small_config):
    drop = generate_drop(small_config, 3)
    frame = drop.to_frame()
    M, K = drop.M, drop.K
    assert list(frame.columns) == ["link_type", "tx", "rx", "distance_m", "gain"]
    assert len(frame) == M + 2 * K + K * (K - 1) + M * K
    assert (frame["distance_m"] > 0).all()
