import logging

import numpy as np
import pytest
from scipy import stats

from src.api.models import SystemConfig
from src.api.services.verification import empirical_ergodic_rate, empirical_outage
from src.api.utils.allocators import run_4sa
from src.api.utils.power_control import PowerAllocation, gamma_bar
from src.api.utils.quantization import ResolutionProfile, psi_stats
from src.api.utils.rate_matching import cue_ergodic_rate
from src.api.utils.scenario import generate_drop

logger = logging.getLogger(__name__)

FADING_TRIALS = 10_000
MIN_OUTAGE_CLUSTERS = 100
MAX_OUTAGE_DROPS = 100


def _single_due_config() -> SystemConfig:
    return SystemConfig(M=1, K=1, sigma2=1e-3, gamma0_d=1.0, p0=0.1)


def _noise_limited_allocation(config: SystemConfig, scale: float = 1.0) -> PowerAllocation:
    threshold = gamma_bar(config.gamma0_d, config.p0)
    return PowerAllocation(
        cue=0,
        members=(0,),
        p_c=0.0,
        p_d=np.array([scale * threshold * config.sigma2]),
        feasible=True,
        gamma_bar=threshold,
    )


def test_outage_at_the_equality_point_matches_p0(drop_factory):
    config = _single_due_config()
    estimate = empirical_outage(
        _noise_limited_allocation(config),
        drop_factory([1.0]),
        config,
        FADING_TRIALS,
        np.random.default_rng(1),
    )
    assert estimate.members == (0,)
    assert abs(estimate.outage[0] - config.p0) < 3 * estimate.stderr(config.p0)


def test_doubling_due_power_lowers_outage(drop_factory):
    config = _single_due_config()
    estimate = empirical_outage(
        _noise_limited_allocation(config, scale=2.0),
        drop_factory([1.0]),
        config,
        FADING_TRIALS,
        np.random.default_rng(2),
    )
    assert estimate.outage[0] < config.p0
    assert estimate.max_z_score(config.p0) < -4


def test_zero_threshold_never_fails(drop_factory):
    config = _single_due_config()
    estimate = empirical_outage(
        _noise_limited_allocation(config),
        drop_factory([1.0]),
        config,
        1000,
        np.random.default_rng(3),
        gamma0_d=0.0,
    )
    assert estimate.outage.tolist() == [0.0]


def test_too_few_fading_trials_are_flagged(drop_factory, caplog):
    config = _single_due_config()
    with caplog.at_level(logging.WARNING, logger="src.api.services.verification"):
        empirical_outage(
            _noise_limited_allocation(config),
            drop_factory([1.0]),
            config,
            500,
            np.random.default_rng(5),
        )
    assert "Only 500 fading trials" in caplog.text


def test_4sa_allocations_keep_their_outage_bound():
    """Minstens 100 gematchte clusters uit standaard-drops, elk met 10^4 fading-trekkingen.

    De closed-form vermogens zijn conservatief, dus elke DUE moet onder p0 blijven
    binnen de MC-fout. De drempel is 3 sigma, verhoogd met Bonferroni over het
    aantal DUE-schattingen (familie-foutkans 1%).
    """
    config = SystemConfig()
    rng = np.random.default_rng(4)
    z_scores: list[float] = []
    clusters = 0
    for seed in range(MAX_OUTAGE_DROPS):
        drop = generate_drop(config, seed)
        result = run_4sa(drop, config)
        for allocation in result.powers.values():
            estimate = empirical_outage(allocation, drop, config, FADING_TRIALS, rng)
            stderr = estimate.stderr(config.p0)
            z_scores.extend(((estimate.outage - config.p0) / stderr).tolist())
            clusters += 1
        if clusters >= MIN_OUTAGE_CLUSTERS:
            break

    assert clusters >= MIN_OUTAGE_CLUSTERS
    threshold = max(3.0, float(stats.norm.isf(0.01 / len(z_scores))))
    worst = max(z_scores)
    logger.info(
        f"Worst outage z-score {worst:.2f} over {len(z_scores)} DUEs in {clusters} "
        f"clusters (threshold {threshold:.2f})"
    )
    assert worst < threshold


def _random_rate_case(rng: np.random.Generator, N_R: int, drop_factory):
    b_max = int(rng.integers(2, 7))
    counts = rng.multinomial(N_R, rng.dirichlet(np.ones(b_max)))
    profile = ResolutionProfile.from_sequence(counts)
    n_dues = int(rng.integers(1, 5))
    drop = drop_factory(
        [1.0] * n_dues,
        cue_bs_gain=[10 ** rng.uniform(-9.5, -8.5)],
        due_bs_gain=10 ** rng.uniform(-12.5, -11.5, size=n_dues),
    )
    allocation = PowerAllocation(
        cue=0,
        members=tuple(range(n_dues)),
        p_c=float(rng.uniform(0.05, 0.2)),
        p_d=rng.uniform(0.01, 0.2, size=n_dues),
        feasible=True,
        gamma_bar=1.0,
    )
    return profile, drop, allocation


@pytest.mark.parametrize("N_R", [16, 32])
def test_closed_form_rate_tracks_monte_carlo(drop_factory, N_R):
    rng = np.random.default_rng(N_R)
    sigma2 = 1e-11
    for _ in range(10):
        profile, drop, allocation = _random_rate_case(rng, N_R, drop_factory)
        psi1, psi2 = psi_stats(profile)
        closed_form = cue_ergodic_rate(
            0, list(allocation.members), allocation, psi1, psi2, drop, sigma2
        )
        sampled = empirical_ergodic_rate(
            allocation, profile, drop, sigma2, fading_trials=4000, rng=rng
        )
        assert sampled == pytest.approx(closed_form, rel=0.25), profile.counts
