import logging
from typing import Optional

import numpy as np

from src.api.exceptions import Infeasible
from src.api.models import SystemConfig
from src.api.utils.allocators.base import (
    AllocationEngine,
    AllocationResult,
    compose_result,
)
from src.api.utils.clustering import build_interference_graph, cluster_dues
from src.api.utils.quantization import ResolutionProfile, bs_energy
from src.api.utils.rate_matching import Matching, build_rate_matrix
from src.api.utils.scenario import ScenarioDrop

logger = logging.getLogger(__name__)

RANDOM_ALLOCATION = "RA"
# Keeps the RA permutation stream apart from the drop's own stream
_RA_STREAM = 0x5241


def random_matching(rates: np.ndarray, rng: np.random.Generator) -> Matching:
    """Map CUEs to clusters by a uniformly random permutation.

    Pairs without a feasible allocation leave their CUE unmatched.
    """
    n_rows, n_cols = rates.shape
    size = min(n_rows, n_cols)
    columns = rng.permutation(n_cols)[:size]
    rows = np.sort(rng.permutation(n_rows)[:size]) if n_rows > n_cols else np.arange(size)
    pairs = tuple(
        (int(m), int(n)) for m, n in zip(rows, columns) if np.isfinite(rates[m, n])
    )
    matched = {m for m, _ in pairs}
    return Matching(
        pairs=pairs,
        unmatched=tuple(m for m in range(n_rows) if m not in matched),
        total=float(sum(rates[m, n] for m, n in pairs)),
    )


def run_ra_baseline(
    drop: ScenarioDrop, config: SystemConfig, seed: Optional[int] = None
) -> AllocationResult:
    """Random allocation: all-1-bit ADCs, 4SA clustering and powers, random mapping.

    Args:
        drop (ScenarioDrop): the drop to allocate.
        config (SystemConfig): scenario constants.
        seed (int, optional): permutation seed. Defaults to one derived from
            the drop seed.

    Raises:
        Infeasible: if even the all-1-bit profile exceeds J.
    """
    profile = ResolutionProfile.uniform(config.N_R, config.B_max, 1)
    energy = bs_energy(profile, config.energy_c0, config.c1)
    if energy > config.J * (1.0 + 1e-12):
        raise Infeasible(f"All-1-bit energy {energy:g} exceeds J={config.J:g}")
    if seed is None:
        base = drop.drop_seed if drop.drop_seed is not None else 0
        rng = np.random.default_rng(np.random.SeedSequence([base, _RA_STREAM]))
    else:
        rng = np.random.default_rng(seed)

    clusters = cluster_dues(build_interference_graph(drop), config.num_clusters)
    rate_matrix = build_rate_matrix(drop, clusters, profile, config)
    matching = random_matching(rate_matrix.rates, rng)
    result = compose_result(
        RANDOM_ALLOCATION, drop, config, profile, clusters, rate_matrix, matching
    )
    logger.debug(f"RA on drop {drop.drop_seed}: sum rate {result.sum_rate:.3f}")
    return result


class RandomAllocator(AllocationEngine):
    """Ad-hoc referentie: goedkoopste ADC-profiel en willekeurige toewijzing."""

    name = RANDOM_ALLOCATION

    def allocate(self, drop: ScenarioDrop, config: SystemConfig) -> AllocationResult:
        return run_ra_baseline(drop, config)
