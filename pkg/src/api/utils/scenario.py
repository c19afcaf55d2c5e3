"""Freeway drops: vehicle placement, CUE/DUE selection and slow fading."""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union, overload

import numpy as np
import pandas as pd

from src.api.exceptions import ConfigError, DomainError
from src.api.models import SystemConfig

logger = logging.getLogger(__name__)

SPEED_OF_LIGHT = 299_792_458.0
_ROAD_EXTENSION = 1.5


class LinkKind(str, Enum):
    V2I = "V2I"
    V2V = "V2V"


@dataclass(frozen=True)
class ChannelModel:
    """Path-loss and shadowing constants for the two link kinds.

    V2I: ``intercept + slope * log10(d / km)`` dB with log-normal shadowing.
    V2V: log-distance law with the given exponent, referenced to free space at
    1 m for the carrier frequency.
    """

    v2i_intercept_db: float = 128.1
    v2i_slope_db: float = 37.6
    v2i_shadow_db: float = 8.0
    v2v_exponent: float = 3.68
    carrier_ghz: float = 2.0
    v2v_shadow_db: float = 3.0

    @classmethod
    def from_config(cls, config: SystemConfig) -> "ChannelModel":
        return cls(
            v2i_intercept_db=config.v2i_intercept_db,
            v2i_slope_db=config.v2i_slope_db,
            v2i_shadow_db=config.v2i_shadow_db,
            v2v_exponent=config.v2v_exponent,
            carrier_ghz=config.carrier_ghz,
            v2v_shadow_db=config.v2v_shadow_db,
        )

    @property
    def v2v_reference_db(self) -> float:
        """Free-space loss at 1 m."""
        return 20.0 * math.log10(4.0 * math.pi * self.carrier_ghz * 1e9 / SPEED_OF_LIGHT)

    def shadow_std_db(self, link_kind: LinkKind) -> float:
        return self.v2i_shadow_db if link_kind == LinkKind.V2I else self.v2v_shadow_db

    def path_loss_db(
        self, distance_m: Union[float, np.ndarray], link_kind: LinkKind
    ) -> Union[float, np.ndarray]:
        if link_kind == LinkKind.V2I:
            return self.v2i_intercept_db + self.v2i_slope_db * np.log10(
                np.asarray(distance_m) / 1000.0
            )
        return self.v2v_reference_db + 10.0 * self.v2v_exponent * np.log10(
            np.asarray(distance_m)
        )


DEFAULT_CHANNEL = ChannelModel()


@overload
def slow_fading_gain(
    distance_m: float,
    link_kind: LinkKind,
    shadow_db: float,
    channel: Optional[ChannelModel] = None,
) -> float: ...


@overload
def slow_fading_gain(
    distance_m: np.ndarray,
    link_kind: LinkKind,
    shadow_db: Union[float, np.ndarray],
    channel: Optional[ChannelModel] = None,
) -> np.ndarray: ...


def slow_fading_gain(
    distance_m: Union[float, np.ndarray],
    link_kind: LinkKind,
    shadow_db: Union[float, np.ndarray],
    channel: Optional[ChannelModel] = None,
) -> Union[float, np.ndarray]:
    """Linear slow-fading gain 10^(-(PL_dB(d) + shadow_db) / 10).

    Args:
        distance_m (float | np.ndarray): link length(s) in metres.
        link_kind (LinkKind): V2I or V2V path-loss law.
        shadow_db (float | np.ndarray): shadowing realisation(s) in dB.
        channel (ChannelModel, optional): constants. Defaults to DEFAULT_CHANNEL.

    Raises:
        DomainError: if any distance is not strictly positive.

    Returns:
        float | np.ndarray: gain(s), same shape as ``distance_m``.
    """
    channel = channel or DEFAULT_CHANNEL
    distances = np.asarray(distance_m, dtype=float)
    if np.any(~(distances > 0.0)):
        raise DomainError(f"Link distance must be > 0, got {distance_m}")
    gain = 10.0 ** (-(channel.path_loss_db(distances, link_kind) + shadow_db) / 10.0)
    if np.ndim(gain) == 0:
        return float(gain)
    return np.asarray(gain)


@dataclass(frozen=True)
class ScenarioDrop:
    """Eén realisatie van voertuigposities en alle slow-fading coëfficiënten.

    Index conventions: CUE m in 0..M-1, DUE pair k in 0..K-1.
    ``due_cross_gain[k', k]`` is the gain from DUE Tx k' to DUE Rx k; its
    diagonal repeats ``due_gain`` and is never used as interference.
    """

    cue_bs_gain: np.ndarray  # (M,)  alpha_{m,B}
    due_gain: np.ndarray  # (K,)  alpha_k
    due_cross_gain: np.ndarray  # (K, K) alpha_{k',k}
    cue_due_gain: np.ndarray  # (M, K) alpha_{m,k}
    due_bs_gain: np.ndarray  # (K,)  alpha_{k,B}
    positions: np.ndarray  # (V, 2) metres
    cue_vehicles: np.ndarray  # (M,) vehicle indices
    due_tx_vehicles: np.ndarray  # (K,)
    due_rx_vehicles: np.ndarray  # (K,)
    bs_position: np.ndarray  # (2,)
    road_length_m: float
    drop_seed: Optional[int] = None

    @property
    def M(self) -> int:
        return int(self.cue_bs_gain.shape[0])

    @property
    def K(self) -> int:
        return int(self.due_gain.shape[0])

    def to_frame(self) -> pd.DataFrame:
        """One row per link: link type, endpoints, distance and gain."""
        pos = self.positions
        bs = self.bs_position
        rows: list[dict[str, object]] = []

        def add(link: str, tx: str, rx: str, a: np.ndarray, b: np.ndarray, g: float) -> None:
            rows.append(
                {
                    "link_type": link,
                    "tx": tx,
                    "rx": rx,
                    "distance_m": float(np.linalg.norm(a - b)),
                    "gain": float(g),
                }
            )

        for m, v in enumerate(self.cue_vehicles):
            add("cue_bs", f"cue{m}", "bs", pos[v], bs, self.cue_bs_gain[m])
        for k, (tx, rx) in enumerate(zip(self.due_tx_vehicles, self.due_rx_vehicles)):
            add("due", f"due_tx{k}", f"due_rx{k}", pos[tx], pos[rx], self.due_gain[k])
            add("due_bs", f"due_tx{k}", "bs", pos[tx], bs, self.due_bs_gain[k])
        for k_src, tx in enumerate(self.due_tx_vehicles):
            for k_dst, rx in enumerate(self.due_rx_vehicles):
                if k_src != k_dst:
                    add(
                        "due_cross",
                        f"due_tx{k_src}",
                        f"due_rx{k_dst}",
                        pos[tx],
                        pos[rx],
                        self.due_cross_gain[k_src, k_dst],
                    )
        for m, v in enumerate(self.cue_vehicles):
            for k, rx in enumerate(self.due_rx_vehicles):
                add("cue_due", f"cue{m}", f"due_rx{k}", pos[v], pos[rx], self.cue_due_gain[m, k])
        return pd.DataFrame(rows)


def drop_vehicles(
    config: SystemConfig,
    rng: np.random.Generator,
    road_length_m: Optional[float] = None,
) -> np.ndarray:
    """Place vehicles lane by lane with a 1-D Poisson process.

    The per-lane density is 1 / (headway_s * v) vehicles per metre.

    Returns:
        np.ndarray: (V, 2) positions, x along the road, y the lane centre.
    """
    length = config.road_length_m if road_length_m is None else road_length_m
    lanes = []
    for lane in range(config.lanes):
        count = rng.poisson(config.vehicle_density * length)
        x = rng.uniform(0.0, length, size=count)
        y = np.full(count, (lane + 0.5) * config.lane_width_m)
        lanes.append(np.column_stack((x, y)))
    return np.concatenate(lanes) if lanes else np.empty((0, 2))


def _pair_receivers(positions: np.ndarray, taken: np.ndarray, due_tx: np.ndarray) -> np.ndarray:
    """Pick each DUE receiver as the nearest vehicle that is still unused.

    DUEs are paired in index order; distance ties go to the lower vehicle index.
    """
    available = ~taken.copy()
    receivers = np.empty(len(due_tx), dtype=int)
    for k, tx in enumerate(due_tx):
        distance = np.linalg.norm(positions - positions[tx], axis=1)
        distance[~available] = np.inf
        rx = int(np.argmin(distance))
        receivers[k] = rx
        available[rx] = False
    return receivers


def build_drop(
    config: SystemConfig,
    positions: np.ndarray,
    cue_vehicles: np.ndarray,
    due_tx_vehicles: np.ndarray,
    rng: np.random.Generator,
    road_length_m: Optional[float] = None,
    drop_seed: Optional[int] = None,
) -> ScenarioDrop:
    """Pair the DUEs and compute every slow-fading coefficient of a drop.

    Args:
        config (SystemConfig): scenario (geometry and channel constants).
        positions (np.ndarray): (V, 2) vehicle positions.
        cue_vehicles (np.ndarray): vehicle index of every CUE.
        due_tx_vehicles (np.ndarray): vehicle index of every DUE transmitter.
        rng (np.random.Generator): source of the shadowing samples.
        road_length_m (float, optional): road length the BS is centred on.
        drop_seed (int, optional): seed recorded on the drop.

    Raises:
        ConfigError: if there are not enough vehicles for the receivers.

    Returns:
        ScenarioDrop: the drop.
    """
    positions = np.asarray(positions, dtype=float)
    cue_vehicles = np.asarray(cue_vehicles, dtype=int)
    due_tx_vehicles = np.asarray(due_tx_vehicles, dtype=int)
    length = config.road_length_m if road_length_m is None else road_length_m
    needed = len(cue_vehicles) + 2 * len(due_tx_vehicles)
    if len(positions) < needed:
        raise ConfigError(f"Drop holds {len(positions)} vehicles, {needed} are needed")

    taken = np.zeros(len(positions), dtype=bool)
    taken[cue_vehicles] = True
    taken[due_tx_vehicles] = True
    due_rx_vehicles = _pair_receivers(positions, taken, due_tx_vehicles)

    bs = np.array([length / 2.0, -config.bs_offset_m])
    channel = ChannelModel.from_config(config)

    def gains(a: np.ndarray, b: np.ndarray, kind: LinkKind) -> np.ndarray:
        distance = np.linalg.norm(a - b, axis=-1)
        shadow = rng.normal(0.0, channel.shadow_std_db(kind), size=distance.shape)
        return slow_fading_gain(distance, kind, shadow, channel)

    tx_pos = positions[due_tx_vehicles]
    rx_pos = positions[due_rx_vehicles]
    cue_pos = positions[cue_vehicles]

    cue_bs_gain = gains(cue_pos, bs, LinkKind.V2I)
    due_bs_gain = gains(tx_pos, bs, LinkKind.V2I)
    due_gain = gains(tx_pos, rx_pos, LinkKind.V2V)
    due_cross_gain = gains(tx_pos[:, None, :], rx_pos[None, :, :], LinkKind.V2V)
    np.fill_diagonal(due_cross_gain, due_gain)
    cue_due_gain = gains(cue_pos[:, None, :], rx_pos[None, :, :], LinkKind.V2V)

    return ScenarioDrop(
        cue_bs_gain=np.atleast_1d(cue_bs_gain),
        due_gain=np.atleast_1d(due_gain),
        due_cross_gain=np.atleast_2d(due_cross_gain),
        cue_due_gain=np.atleast_2d(cue_due_gain),
        due_bs_gain=np.atleast_1d(due_bs_gain),
        positions=positions,
        cue_vehicles=cue_vehicles,
        due_tx_vehicles=due_tx_vehicles,
        due_rx_vehicles=due_rx_vehicles,
        bs_position=bs,
        road_length_m=length,
        drop_seed=drop_seed,
    )


def generate_drop(config: SystemConfig, drop_seed: int) -> ScenarioDrop:
    """Generate one freeway drop, a pure function of (config, drop_seed).

    When the Poisson drop holds fewer than M + 2K vehicles the road is
    extended and the drop is redrawn, up to ``max_density_retries`` times.

    Raises:
        ConfigError: if the road cannot host M + 2K vehicles.
    """
    rng = np.random.default_rng(drop_seed)
    needed = config.M + 2 * config.K
    length = config.road_length_m
    for attempt in range(config.max_density_retries):
        positions = drop_vehicles(config, rng, length)
        if len(positions) >= needed:
            break
        logger.debug(
            f"Drop {drop_seed}: {len(positions)} vehicles < {needed} on "
            f"{length:.0f} m (attempt {attempt + 1}), extending road"
        )
        length *= _ROAD_EXTENSION
    else:
        raise ConfigError(
            f"Road cannot host M + 2K = {needed} vehicles at {config.speed_kmh} km/h "
            f"after {config.max_density_retries} attempts (last length {length:.0f} m)"
        )

    chosen = rng.permutation(len(positions))
    cue_vehicles = chosen[: config.M]
    due_tx_vehicles = chosen[config.M : config.M + config.K]
    return build_drop(
        config,
        positions,
        cue_vehicles,
        due_tx_vehicles,
        rng,
        road_length_m=length,
        drop_seed=drop_seed,
    )
