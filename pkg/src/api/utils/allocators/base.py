from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from src.api.models import SystemConfig
from src.api.utils.clustering import ClusterAssignment
from src.api.utils.power_control import PowerAllocation
from src.api.utils.quantization import ResolutionProfile, bs_energy
from src.api.utils.rate_matching import Matching, RateMatrix
from src.api.utils.scenario import ScenarioDrop


@dataclass(frozen=True)
class AllocationResult:
    """Uitkomst van één allocatie op één drop.

    ``cue_rates[m]`` is 0 for CUEs left without a feasible cluster; those CUEs
    are listed in ``unmatched`` and excluded from ``sum_rate``.
    """

    algorithm: str
    profile: ResolutionProfile
    clusters: ClusterAssignment
    matching: Matching
    powers: dict[int, PowerAllocation] = field(repr=False)
    cue_rates: np.ndarray = field(repr=False)
    sum_rate: float
    energy: float
    infeasible_pairs: int
    rate_matrix: Optional[RateMatrix] = field(default=None, repr=False)

    @property
    def unmatched(self) -> tuple[int, ...]:
        return self.matching.unmatched

    def summary(self) -> dict[str, object]:
        return {
            "algorithm": self.algorithm,
            "sum_rate": self.sum_rate,
            "energy": self.energy,
            "infeasible_pairs": self.infeasible_pairs,
            "unmatched_cues": len(self.unmatched),
            "profile": list(self.profile.counts),
        }


class AllocationEngine(ABC):
    """Abstracte basisinterface voor allocatie-algoritmen.

    Alle concrete algoritmen (4SA, willekeurige toewijzing) implementeren deze
    interface zodat de Monte-Carlo harness ze uitwisselbaar kan draaien.
    """

    name: str

    @abstractmethod
    def allocate(self, drop: ScenarioDrop, config: SystemConfig) -> AllocationResult:
        """Allocate ADC profile, clusters, powers and spectrum on one drop.

        Args:
            drop (ScenarioDrop): the drop to allocate.
            config (SystemConfig): scenario and constraint constants.

        Raises:
            Infeasible: if the energy budget admits no resolution profile.

        Returns:
            AllocationResult: the allocation and its CUE rates.
        """
        pass


def compose_result(
    algorithm: str,
    drop: ScenarioDrop,
    config: SystemConfig,
    profile: ResolutionProfile,
    clusters: ClusterAssignment,
    rate_matrix: RateMatrix,
    matching: Matching,
) -> AllocationResult:
    """Collect per-CUE rates and powers of the matched pairs into a result."""
    cue_rates = np.zeros(drop.M)
    powers: dict[int, PowerAllocation] = {}
    for m, n in matching.pairs:
        cue_rates[m] = rate_matrix.rates[m, n]
        powers[m] = rate_matrix.allocations[(m, n)]
    return AllocationResult(
        algorithm=algorithm,
        profile=profile,
        clusters=clusters,
        matching=matching,
        powers=powers,
        cue_rates=cue_rates,
        sum_rate=float(cue_rates.sum()),
        energy=bs_energy(profile, config.energy_c0, config.c1),
        infeasible_pairs=rate_matrix.infeasible_pairs,
        rate_matrix=rate_matrix,
    )
