import math

import numpy as np
import pytest

from src.api.exceptions import ScaleError
from src.api.models import SystemConfig
from src.api.utils.clustering import ClusterAssignment
from src.api.utils.power_control import PowerAllocation, allocate_powers
from src.api.utils.quantization import ResolutionProfile, psi_stats
from src.api.utils.rate_matching import (
    brute_force_match_oracle,
    build_rate_matrix,
    cue_ergodic_rate,
    hungarian_match,
)


def _powers(p_c: float, p_d=()) -> PowerAllocation:
    p_d = np.asarray(p_d, dtype=float)
    return PowerAllocation(
        cue=0,
        members=tuple(range(len(p_d))),
        p_c=p_c,
        p_d=p_d,
        feasible=True,
        gamma_bar=1.0,
    )


def test_rate_is_zero_without_cue_power(drop_factory):
    drop = drop_factory([1.0], due_bs_gain=[0.5])
    assert cue_ergodic_rate(0, [0], _powers(0.0, [1.0]), 3.0, 2.0, drop, 1.0) == 0.0


def test_rate_with_two_ideal_antennas(drop_factory):
    drop = drop_factory([1.0], cue_bs_gain=[1.0])
    assert cue_ergodic_rate(0, [], _powers(1.0), 2.0, 2.0, drop, 1.0) == pytest.approx(2.0)


def test_ideal_adcs_collapse_to_mrc_rate(drop_factory):
    rng = np.random.default_rng(11)
    for _ in range(1000):
        N_R = int(rng.integers(1, 65))
        size = int(rng.integers(1, 4))
        alpha = float(10 ** rng.uniform(-9, -6))
        due_bs = 10 ** rng.uniform(-13, -11, size=size)
        drop = drop_factory([1.0] * size, cue_bs_gain=[alpha], due_bs_gain=due_bs)
        powers = _powers(float(rng.uniform(0.01, 0.2)), rng.uniform(0.0, 0.2, size=size))
        sigma2 = float(10 ** rng.uniform(-15, -12))
        rate = cue_ergodic_rate(0, list(range(size)), powers, float(N_R), float(N_R), drop, sigma2)
        interference = float(np.dot(powers.p_d, due_bs))
        expected = math.log2(1 + powers.p_c * alpha * (N_R + 1) / (sigma2 + interference))
        assert rate == pytest.approx(expected, rel=1e-12)


def test_rate_grows_with_cue_power_and_shrinks_with_due_power(drop_factory):
    drop = drop_factory([1.0, 1.0], cue_bs_gain=[1e-9], due_bs_gain=[1e-10, 2e-10])
    psi1, psi2 = psi_stats(ResolutionProfile.uniform(16, 4, 2))

    def rate(p_c, p_d):
        return cue_ergodic_rate(0, [0, 1], _powers(p_c, p_d), psi1, psi2, drop, 1e-12)

    assert rate(0.1, [0.05, 0.05]) < rate(0.2, [0.05, 0.05])
    assert rate(0.1, [0.05, 0.05]) > rate(0.1, [0.1, 0.05])
    assert rate(0.1, [0.05, 0.05]) > rate(0.1, [0.05, 0.1])


def test_rate_matrix_entries_match_independent_evaluations(drop_factory):
    config = SystemConfig(M=2, K=4, gamma0_d=1.0, p0=0.1, sigma2=1e-3, N_R=8)
    rng = np.random.default_rng(5)
    drop = drop_factory(
        rng.uniform(0.5, 1.0, size=4),
        rng.uniform(0.0, 0.01, size=(4, 4)),
        cue_bs_gain=[0.3, 0.6],
        cue_due_gain=rng.uniform(0.0, 0.01, size=(2, 4)),
        due_bs_gain=rng.uniform(0.0, 0.01, size=4),
    )
    clusters = ClusterAssignment.from_labels([0, 1, 0, 1], 2)
    profile = ResolutionProfile.uniform(8, 7, 3)
    psi1, psi2 = psi_stats(profile)
    matrix = build_rate_matrix(drop, clusters, profile, config)
    assert matrix.rates.shape == (2, 2)
    for m in range(2):
        for n, members in enumerate(clusters.members):
            allocation = allocate_powers(m, members, drop, config)
            assert allocation.feasible
            expected = cue_ergodic_rate(m, members, allocation, psi1, psi2, drop, config.sigma2)
            assert matrix.rates[m, n] == pytest.approx(expected, rel=1e-12)
    assert matrix.infeasible_pairs == 0
    assert list(matrix.to_frame().columns) == ["cluster_0", "cluster_1"]


def test_rate_matrix_marks_infeasible_pairs(drop_factory):
    config = SystemConfig(M=2, K=2, gamma0_d=1e6, sigma2=1.0)
    drop = drop_factory([1.0, 1.0], cue_bs_gain=[1.0, 1.0])
    clusters = ClusterAssignment.from_labels([0, 1], 2)
    matrix = build_rate_matrix(drop, clusters, ResolutionProfile.uniform(4, 2, 1), config)
    assert np.all(np.isneginf(matrix.rates))
    assert matrix.infeasible_pairs == 4


def test_hungarian_examples():
    assert hungarian_match(np.eye(2)).total == 2.0
    assert hungarian_match(np.array([[1.0, 2.0], [3.0, 4.0]])).total == 5.0
    diagonal = np.full((3, 3), 1.0) + 4.0 * np.eye(3)
    matching = hungarian_match(diagonal)
    assert matching.pairs == ((0, 0), (1, 1), (2, 2))
    assert matching.total == 15.0


def test_hungarian_avoids_forbidden_pairs():
    rates = np.array([[-np.inf, 1.0], [5.0, 9.0]])
    matching = hungarian_match(rates)
    assert matching.pairs == ((0, 1), (1, 0))
    assert matching.unmatched == ()
    assert matching.total == 6.0


def test_hungarian_reports_unmatched_cues():
    rates = np.array([[-np.inf, -np.inf], [2.0, 3.0]])
    matching = hungarian_match(rates)
    assert matching.pairs == ((1, 1),)
    assert matching.unmatched == (0,)
    assert matching.cluster_of(0) is None
    all_forbidden = hungarian_match(np.full((2, 2), -np.inf))
    assert all_forbidden.pairs == () and all_forbidden.total == 0.0


def test_oracle_small_cases():
    single = brute_force_match_oracle(np.array([[0.7]]))
    assert single.pairs == ((0, 0),) and single.total == 0.7
    rates = np.array([[1.0, 4.0], [2.0, 1.5]])
    assert brute_force_match_oracle(rates).total == max(1.0 + 1.5, 4.0 + 2.0)


def test_oracle_scale_guard():
    with pytest.raises(ScaleError):
        brute_force_match_oracle(np.zeros((9, 9)))


def test_hungarian_matches_oracle_on_random_matrices():
    rng = np.random.default_rng(99)
    for trial in range(500):
        size = int(rng.integers(1, 9))
        rates = rng.uniform(0.0, 10.0, size=(size, size))
        if trial % 3 == 0:
            rates[rng.uniform(size=rates.shape) < 0.3] = -np.inf
        hungarian = hungarian_match(rates)
        oracle = brute_force_match_oracle(rates)
        assert len(hungarian.pairs) == len(oracle.pairs)
        assert hungarian.total == pytest.approx(oracle.total, abs=1e-12)


def test_hungarian_returns_lowest_index_optimum_among_ties():
    tied = hungarian_match(np.array([[1.0, 2.0], [3.0, 4.0]]))
    assert tied.pairs == ((0, 0), (1, 1))
    assert hungarian_match(np.ones((3, 3))).pairs == ((0, 0), (1, 1), (2, 2))
    assert hungarian_match(np.array([[0.0, 5.0], [0.0, 5.0]])).pairs == ((0, 0), (1, 1))

    rng = np.random.default_rng(7)
    for trial in range(200):
        size = int(rng.integers(2, 7))
        rates = rng.integers(0, 3, size=(size, size)).astype(float)
        if trial % 4 == 0:
            rates[rng.uniform(size=rates.shape) < 0.25] = -np.inf
        assert hungarian_match(rates).pairs == brute_force_match_oracle(rates).pairs
