"""Shared fixtures for the simulator tests."""

from typing import Callable, Optional, Sequence

import numpy as np
import pytest

from src.api.models import SystemConfig
from src.api.utils.scenario import ScenarioDrop

DropFactory = Callable[..., ScenarioDrop]


@pytest.fixture
def small_config() -> SystemConfig:
    """Een klein scenario dat snel genoeg is voor unit tests."""
    return SystemConfig(M=3, K=6, N_R=8, trials=4, seed=7)


@pytest.fixture
def drop_factory() -> DropFactory:
    """Build a ScenarioDrop straight from gain arrays, without geometry."""

    def make_drop(
        due_gain: Sequence[float],
        due_cross_gain: Optional[Sequence[Sequence[float]]] = None,
        cue_bs_gain: Sequence[float] = (1.0,),
        cue_due_gain: Optional[Sequence[Sequence[float]]] = None,
        due_bs_gain: Optional[Sequence[float]] = None,
        drop_seed: Optional[int] = None,
    ) -> ScenarioDrop:
        due = np.asarray(due_gain, dtype=float)
        K = len(due)
        cue = np.asarray(cue_bs_gain, dtype=float)
        M = len(cue)
        cross = (
            np.full((K, K), 1e-12)
            if due_cross_gain is None
            else np.array(due_cross_gain, dtype=float)
        )
        np.fill_diagonal(cross, due)
        cue_due = (
            np.full((M, K), 1e-12)
            if cue_due_gain is None
            else np.asarray(cue_due_gain, dtype=float)
        )
        due_bs = (
            np.full(K, 1e-12) if due_bs_gain is None else np.asarray(due_bs_gain, dtype=float)
        )
        vehicles = M + 2 * K
        return ScenarioDrop(
            cue_bs_gain=cue,
            due_gain=due,
            due_cross_gain=cross,
            cue_due_gain=cue_due,
            due_bs_gain=due_bs,
            positions=np.column_stack((np.arange(vehicles, dtype=float), np.zeros(vehicles))),
            cue_vehicles=np.arange(M),
            due_tx_vehicles=np.arange(M, M + K),
            due_rx_vehicles=np.arange(M + K, M + 2 * K),
            bs_position=np.array([0.0, -35.0]),
            road_length_m=float(vehicles),
            drop_seed=drop_seed,
        )

    return make_drop
