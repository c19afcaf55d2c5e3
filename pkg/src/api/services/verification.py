"""Fast-fading Monte-Carlo checks of the closed-form models.

The allocation only knows slow fading. These helpers draw unit-power Rayleigh
fading for every link involved and measure what the closed forms promise:
the DUE outage probability and the CUE ergodic rate behind the AQNM front end.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.api.models import SystemConfig
from src.api.utils.power_control import PowerAllocation
from src.api.utils.quantization import ResolutionProfile
from src.api.utils.scenario import ScenarioDrop

logger = logging.getLogger(__name__)

DEFAULT_FADING_TRIALS = 10_000


@dataclass(frozen=True)
class OutageEstimate:
    """Empirische outagekans per DUE van een cluster (volgorde van ``members``)."""

    members: tuple[int, ...]
    outage: np.ndarray
    fading_trials: int

    def stderr(self, p: float) -> float:
        """Monte-Carlo standard error of an outage estimate around probability p."""
        return math.sqrt(p * (1.0 - p) / self.fading_trials)

    def max_z_score(self, p0: float) -> float:
        """Largest (estimate - p0) in units of the standard error at p0."""
        return float(np.max((self.outage - p0) / self.stderr(p0)))


def _rayleigh_power(rng: np.random.Generator, size: tuple[int, ...]) -> np.ndarray:
    """|h|^2 for h ~ CN(0, 1)."""
    return rng.exponential(1.0, size=size)


def empirical_outage(
    allocation: PowerAllocation,
    drop: ScenarioDrop,
    config: SystemConfig,
    fading_trials: int = DEFAULT_FADING_TRIALS,
    rng: Optional[np.random.Generator] = None,
    gamma0_d: Optional[float] = None,
) -> OutageEstimate:
    """Estimate Pr{SINR_k < gamma0} for every DUE of the sharing cluster.

    The SINR of DUE k counts its own CUE and the other members of its cluster
    as interferers, each link with an independent Rayleigh draw.

    Args:
        allocation (PowerAllocation): powers of the (CUE, cluster) pair.
        drop (ScenarioDrop): slow-fading coefficients.
        config (SystemConfig): noise power and SINR threshold.
        fading_trials (int, optional): fading realisations. Defaults to 10^4.
        rng (np.random.Generator, optional): sample source.
        gamma0_d (float, optional): threshold override. Defaults to config.gamma0_d.

    Returns:
        OutageEstimate: per-DUE outage estimates.
    """
    if fading_trials < DEFAULT_FADING_TRIALS:
        logger.warning(
            f"Only {fading_trials} fading trials; outage estimates below "
            f"{DEFAULT_FADING_TRIALS} samples are too coarse to check p0"
        )
    rng = rng or np.random.default_rng()
    threshold = config.gamma0_d if gamma0_d is None else gamma0_d
    idx = np.asarray(allocation.members, dtype=int)
    n = len(idx)
    m = allocation.cue

    direct = _rayleigh_power(rng, (fading_trials, n)) * drop.due_gain[idx]
    from_cue = _rayleigh_power(rng, (fading_trials, n)) * drop.cue_due_gain[m, idx]
    # cross[t, j, i]: from member j's transmitter to member i's receiver
    cross = _rayleigh_power(rng, (fading_trials, n, n)) * drop.due_cross_gain[
        np.ix_(idx, idx)
    ]
    cross[:, np.arange(n), np.arange(n)] = 0.0

    signal = allocation.p_d * direct
    interference = (
        config.sigma2
        + allocation.p_c * from_cue
        + np.einsum("j,tji->ti", allocation.p_d, cross)
    )
    outage = np.mean(signal < threshold * interference, axis=0)
    return OutageEstimate(
        members=tuple(int(k) for k in idx), outage=outage, fading_trials=fading_trials
    )


def empirical_ergodic_rate(
    allocation: PowerAllocation,
    profile: ResolutionProfile,
    drop: ScenarioDrop,
    sigma2: float,
    fading_trials: int = 2_000,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """Monte-Carlo E[log2(1 + SIQNR)] of a CUE after MRC behind the mixed ADCs.

    The quantized signal is A y + n_q with A = diag(a_{b_i}) and n_q
    uncorrelated with covariance A (I - A) diag(E[y y^H | channel]).
    """
    rng = rng or np.random.default_rng()
    a = profile.coefficients()
    n_r = len(a)
    m = allocation.cue
    idx = np.asarray(allocation.members, dtype=int)

    def channel(gains: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
        h = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
        return np.sqrt(gains)[..., None] * h

    g_m = channel(np.full(fading_trials, drop.cue_bs_gain[m]), (fading_trials, n_r))
    g_k = channel(
        np.broadcast_to(drop.due_bs_gain[idx], (fading_trials, len(idx))),
        (fading_trials, len(idx), n_r),
    )
    gm_power = np.abs(g_m) ** 2
    gk_power = np.abs(g_k) ** 2

    combined = gm_power @ a
    signal = allocation.p_c * combined**2
    cross = np.einsum("ti,tki->tk", np.conj(g_m) * a, g_k)
    due_interference = np.abs(cross) ** 2 @ allocation.p_d
    noise = sigma2 * (gm_power @ a**2)
    rx_power = (
        allocation.p_c * gm_power
        + np.einsum("k,tki->ti", allocation.p_d, gk_power)
        + sigma2
    )
    quantization = (gm_power * rx_power) @ (a * (1.0 - a))
    siqnr = signal / (due_interference + noise + quantization)
    rate = float(np.mean(np.log2(1.0 + siqnr)))
    logger.debug(f"Monte-Carlo ergodic rate of CUE {m}: {rate:.4f} bit/s/Hz")
    return rate
