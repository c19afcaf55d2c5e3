"""AQNM quantization coefficients, resolution profiles and the BS energy model."""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import stats

from src.api.exceptions import DomainError
from src.api.models import MAX_ADC_BITS

logger = logging.getLogger(__name__)

# 1 - MSE of the minimum-MSE (Lloyd-Max) quantizer for a unit Gaussian, b = 1..5
LLOYD_MAX_COEFFS: tuple[float, ...] = (0.6366, 0.8825, 0.96546, 0.990503, 0.997501)

_HIGH_RES_FACTOR = math.pi * math.sqrt(3.0) / 2.0


def quant_coeff(b: int, b_max: int = MAX_ADC_BITS) -> float:
    """Return the AQNM linear gain a_b of a b-bit ADC.

    Tabulated Lloyd-Max values are used up to 5 bits, the high-resolution law
    1 - (pi*sqrt(3)/2) * 2^(-2b) above.

    Raises:
        DomainError: if b is outside [1, b_max].
    """
    if not 1 <= b <= b_max:
        raise DomainError(f"ADC resolution must lie in [1, {b_max}], got {b}")
    if b <= len(LLOYD_MAX_COEFFS):
        return LLOYD_MAX_COEFFS[b - 1]
    return 1.0 - _HIGH_RES_FACTOR * 2.0 ** (-2 * b)


def quant_coeffs(b_max: int) -> np.ndarray:
    """Vector [a_1, ..., a_Bmax]."""
    return np.array([quant_coeff(b, b_max) for b in range(1, b_max + 1)])


@lru_cache(maxsize=None)
def lloyd_max_coeff(b: int, max_iter: int = 5000, tol: float = 1e-13) -> float:
    """Design a 2^b level minimum-MSE quantizer for N(0, 1) and return 1 - MSE.

    Lloyd iterations alternate the nearest-neighbour thresholds (midpoints) and
    the centroid condition; with centroid levels the distortion is
    1 - sum_i P_i * c_i^2.

    Args:
        b (int): number of bits.
        max_iter (int, optional): iteration cap. Defaults to 5000.
        tol (float, optional): stop when the distortion changes less than this.

    Returns:
        float: the AQNM coefficient of the optimal b-bit quantizer.
    """
    if b < 1:
        raise DomainError(f"Number of bits must be >= 1, got {b}")
    levels = 2**b
    # uniform start over +-3 sigma
    centroids = np.linspace(-3.0, 3.0, levels + 2)[1:-1]
    distortion = math.inf
    for iteration in range(max_iter):
        thresholds = np.concatenate(
            ([-np.inf], (centroids[:-1] + centroids[1:]) / 2.0, [np.inf])
        )
        probs = np.diff(stats.norm.cdf(thresholds))
        centroids = -np.diff(stats.norm.pdf(thresholds)) / probs
        new_distortion = 1.0 - float(np.sum(probs * centroids**2))
        if abs(distortion - new_distortion) < tol:
            distortion = new_distortion
            break
        distortion = new_distortion
    logger.debug(f"Lloyd-Max b={b}: MSE={distortion:.6g} after {iteration + 1} steps")
    return 1.0 - distortion


@dataclass(frozen=True)
class ResolutionProfile:
    """Aantal BS-antennes per ADC-resolutie, L = [l_1, ..., l_Bmax].

    ``counts[n - 1]`` is the number of antennas with an n-bit ADC.
    """

    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.counts:
            raise DomainError("A resolution profile needs at least one level")
        if any(c < 0 for c in self.counts):
            raise DomainError(f"Antenna counts must be >= 0, got {self.counts}")
        if len(self.counts) > MAX_ADC_BITS:
            raise DomainError(f"At most {MAX_ADC_BITS} resolution levels supported")
        if self.n_antennas < 1:
            raise DomainError("A resolution profile must hold at least one antenna")

    @classmethod
    def uniform(cls, n_antennas: int, b_max: int, bits: int) -> "ResolutionProfile":
        """All antennas at the same resolution."""
        if not 1 <= bits <= b_max:
            raise DomainError(f"Resolution must lie in [1, {b_max}], got {bits}")
        counts = [0] * b_max
        counts[bits - 1] = n_antennas
        return cls(tuple(counts))

    @classmethod
    def from_sequence(cls, counts: Sequence[int]) -> "ResolutionProfile":
        return cls(tuple(int(c) for c in counts))

    @property
    def b_max(self) -> int:
        return len(self.counts)

    @property
    def n_antennas(self) -> int:
        return sum(self.counts)

    def bits_per_antenna(self) -> np.ndarray:
        """Expand L into the per-antenna resolutions b_i (ascending)."""
        return np.repeat(np.arange(1, self.b_max + 1), self.counts)

    def coefficients(self) -> np.ndarray:
        """Per-antenna AQNM coefficients a_{b_i}, the diagonal of A_b."""
        return quant_coeffs(self.b_max)[self.bits_per_antenna() - 1]

    def to_row(self) -> dict[str, int]:
        """CSV row ``l_1, ..., l_Bmax``."""
        return {f"l_{n}": c for n, c in enumerate(self.counts, start=1)}


def psi_stats(profile: ResolutionProfile) -> tuple[float, float]:
    """Return (psi1, psi2) = (sum_n l_n a_n, sum_n l_n a_n^2)."""
    a = quant_coeffs(profile.b_max)
    counts = np.asarray(profile.counts, dtype=float)
    return float(counts @ a), float(counts @ a**2)


def bs_energy(profile: ResolutionProfile, c0: float, c1: float) -> float:
    """BS energy consumption c0 * sum_n l_n 2^n + c1."""
    if c0 <= 0:
        raise DomainError(f"c0 must be > 0, got {c0}")
    weights = 2.0 ** np.arange(1, profile.b_max + 1)
    return float(c0 * np.dot(profile.counts, weights) + c1)
