import logging
from functools import lru_cache

from src.api.models import SystemConfig
from src.api.utils.adc_search import decremental_search
from src.api.utils.allocators.base import (
    AllocationEngine,
    AllocationResult,
    compose_result,
)
from src.api.utils.clustering import build_interference_graph, cluster_dues
from src.api.utils.quantization import ResolutionProfile
from src.api.utils.rate_matching import build_rate_matrix, hungarian_match
from src.api.utils.scenario import ScenarioDrop

logger = logging.getLogger(__name__)

FOUR_STEP = "4SA"


@lru_cache(maxsize=256)
def _profile_for_budget(
    N_R: int, B_max: int, c0: float, c1: float, J: float
) -> ResolutionProfile:
    return decremental_search(N_R, B_max, c0, c1, J)


def select_profile(config: SystemConfig) -> ResolutionProfile:
    """Step 1, evaluated once per distinct (N_R, B_max, c0, c1, J)."""
    return _profile_for_budget(
        config.N_R, config.B_max, config.energy_c0, config.c1, config.J
    )


def run_4sa(drop: ScenarioDrop, config: SystemConfig) -> AllocationResult:
    """Run the four steps on one drop.

    1. decremental search for the ADC resolution profile under J,
    2. greedy clustering of the DUE interference graph into N clusters,
    3. closed-form powers for every (CUE, cluster) pair,
    4. Hungarian matching of CUEs to clusters on the resulting rates.

    Raises:
        Infeasible: if J is below the all-1-bit energy.
    """
    profile = select_profile(config)
    clusters = cluster_dues(build_interference_graph(drop), config.num_clusters)
    rate_matrix = build_rate_matrix(drop, clusters, profile, config)
    matching = hungarian_match(rate_matrix.rates)
    result = compose_result(
        FOUR_STEP, drop, config, profile, clusters, rate_matrix, matching
    )
    logger.debug(
        f"4SA on drop {drop.drop_seed}: sum rate {result.sum_rate:.3f}, "
        f"{result.infeasible_pairs} infeasible pairs, L={profile.counts}"
    )
    return result


class FourStepAllocator(AllocationEngine):
    """Centrale 4-staps allocatie: ADC-profiel, clustering, vermogen, matching."""

    name = FOUR_STEP

    def allocate(self, drop: ScenarioDrop, config: SystemConfig) -> AllocationResult:
        return run_4sa(drop, config)
