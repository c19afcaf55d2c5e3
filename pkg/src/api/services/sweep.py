"""Monte-Carlo sweeps of 4SA against the random-allocation baseline."""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import ValidationError

from src.api.exceptions import ConfigError, Infeasible
from src.api.models import SystemConfig
from src.api.services.verification import DEFAULT_FADING_TRIALS, empirical_outage
from src.api.utils.allocators import ALGORITHMS, FOUR_STEP, load_allocator
from src.api.utils.scenario import generate_drop

logger = logging.getLogger(__name__)

AXES: dict[str, str] = {
    "speed": "speed_kmh",
    "J": "J",
    "N_R": "N_R",
    "p0": "p0",
}

SWEEP_COLUMNS = [
    "axis_value",
    "algorithm",
    "mean_sum_rate",
    "stderr",
    "trials",
    "excluded_trials",
    "mean_energy",
]


@dataclass(frozen=True)
class SweepPoint:
    """Geaggregeerd resultaat van één algoritme op één sweep-punt.

    ``trials`` is the requested trial count; ``excluded_trials`` of them had
    an infeasible energy budget and do not enter the means.
    """

    axis_value: float
    algorithm: str
    mean_sum_rate: float
    stderr: float
    trials: int
    excluded_trials: int
    mean_energy: float
    worst_outage_margin: Optional[float] = None
    outage_stderr: Optional[float] = None

    @property
    def included_trials(self) -> int:
        return self.trials - self.excluded_trials


@dataclass
class SweepReport:
    """Alle punten van één sweep, voor 4SA en RA."""

    axis: str
    values: list[float]
    trials: int
    seed: int
    points: list[SweepPoint] = field(default_factory=list)

    def point(self, axis_value: float, algorithm: str) -> SweepPoint:
        for p in self.points:
            if p.algorithm == algorithm and math.isclose(p.axis_value, axis_value):
                return p
        raise KeyError(f"No point {axis_value} / {algorithm} in sweep over {self.axis}")

    def series(self, algorithm: str) -> list[SweepPoint]:
        return [p for p in self.points if p.algorithm == algorithm]

    def to_frame(self) -> pd.DataFrame:
        """CSV-ready frame; the outage columns are only present when verified."""
        frame = pd.DataFrame([asdict(p) for p in self.points])
        if frame.empty:
            return pd.DataFrame(columns=SWEEP_COLUMNS)
        if frame["worst_outage_margin"].isna().all():
            frame = frame[SWEEP_COLUMNS]
        return frame


@dataclass(frozen=True)
class _TrialTask:
    config: SystemConfig
    point_index: int
    trial_index: int
    drop_seed: int
    algorithms: tuple[str, ...]
    verify_outage: bool
    fading_trials: int


@dataclass(frozen=True)
class _TrialOutcome:
    point_index: int
    # algorithm -> (sum_rate, energy), None when the budget was infeasible
    results: dict[str, Optional[tuple[float, float]]]
    outage_margin: Optional[float] = None


def trial_seed(master_seed: int, point_index: int, trial_index: int) -> int:
    """Drop seed of one trial, a pure function of its coordinates in the sweep."""
    sequence = np.random.SeedSequence([master_seed, point_index, trial_index])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def config_for_point(config: SystemConfig, axis: str, value: float) -> SystemConfig:
    """Revalidated copy of ``config`` with the swept field set to ``value``.

    The resolved c0 is carried over, so every point shares one energy scale.

    Raises:
        ConfigError: for an unknown axis or a value the scenario rejects.
    """
    if axis not in AXES:
        raise ConfigError(f"Unknown sweep axis {axis!r}; choose from {', '.join(AXES)}")
    name = AXES[axis]
    update: dict[str, object] = {name: int(value) if name == "N_R" else float(value)}
    try:
        return SystemConfig.model_validate(config.model_dump() | update)
    except ValidationError as e:
        raise ConfigError(f"Invalid value {value} for axis {axis}: {e}") from e


def _run_trial(task: _TrialTask) -> _TrialOutcome:
    drop = generate_drop(task.config, task.drop_seed)
    results: dict[str, Optional[tuple[float, float]]] = {}
    margin: Optional[float] = None
    for name in task.algorithms:
        try:
            result = load_allocator(name).allocate(drop, task.config)
        except Infeasible as e:
            logger.debug(f"Trial {task.trial_index} of point {task.point_index}, {name}: {e}")
            results[name] = None
            continue
        results[name] = (result.sum_rate, result.energy)
        if task.verify_outage and name == FOUR_STEP:
            rng = np.random.default_rng(np.random.SeedSequence([task.drop_seed, 1]))
            for allocation in result.powers.values():
                estimate = empirical_outage(
                    allocation, drop, task.config, task.fading_trials, rng
                )
                worst = float(np.max(estimate.outage)) - task.config.p0
                margin = worst if margin is None else max(margin, worst)
    return _TrialOutcome(point_index=task.point_index, results=results, outage_margin=margin)


def _aggregate(
    axis_value: float,
    algorithm: str,
    outcomes: Sequence[_TrialOutcome],
    trials: int,
    p0: float,
    fading_trials: int,
    verified: bool,
) -> SweepPoint:
    kept = [o.results[algorithm] for o in outcomes if o.results.get(algorithm) is not None]
    rates = np.array([r[0] for r in kept if r is not None], dtype=float)
    energies = np.array([r[1] for r in kept if r is not None], dtype=float)
    n = len(rates)
    stderr = float(np.std(rates, ddof=1) / math.sqrt(n)) if n > 1 else 0.0

    margin: Optional[float] = None
    margin_stderr: Optional[float] = None
    if verified and algorithm == FOUR_STEP:
        margins = [o.outage_margin for o in outcomes if o.outage_margin is not None]
        margin = max(margins) if margins else None
        margin_stderr = math.sqrt(p0 * (1.0 - p0) / fading_trials)
    return SweepPoint(
        axis_value=float(axis_value),
        algorithm=algorithm,
        mean_sum_rate=float(rates.mean()) if n else math.nan,
        stderr=stderr,
        trials=trials,
        excluded_trials=trials - n,
        mean_energy=float(energies.mean()) if n else math.nan,
        worst_outage_margin=margin,
        outage_stderr=margin_stderr,
    )


def monte_carlo_sweep(
    config: SystemConfig,
    axis: str,
    values: Iterable[float],
    trials: Optional[int] = None,
    seed: Optional[int] = None,
    workers: int = 1,
    algorithms: Sequence[str] = ALGORITHMS,
    verify_outage: bool = False,
    fading_trials: int = DEFAULT_FADING_TRIALS,
) -> SweepReport:
    """Sweep one scenario field and average the sum rate over independent drops.

    Args:
        config (SystemConfig): base scenario.
        axis (str): one of ``speed``, ``J``, ``N_R``, ``p0``.
        values (Iterable[float]): axis values, in reporting order.
        trials (int, optional): drops per point. Defaults to config.trials.
        seed (int, optional): master seed. Defaults to config.seed.
        workers (int, optional): worker processes; 1 runs in-process.
        algorithms (Sequence[str], optional): allocators to compare.
        verify_outage (bool, optional): sample fast fading for every matched
            4SA cluster and report the worst outage margin per point.
        fading_trials (int, optional): fading samples per verified cluster.

    Raises:
        ConfigError: for an unknown axis, an invalid value or a road that
            cannot host the users.

    Returns:
        SweepReport: one point per (value, algorithm).
    """
    values = [float(v) for v in values]
    trials = config.trials if trials is None else trials
    seed = config.seed if seed is None else seed
    if trials < 1:
        raise ConfigError(f"A sweep needs at least one trial, got {trials}")
    if trials < 30:
        logger.warning(f"Only {trials} trials per point; standard errors are unreliable")

    point_configs = [config_for_point(config, axis, v) for v in values]
    tasks = [
        _TrialTask(
            config=point_config,
            point_index=i,
            trial_index=t,
            drop_seed=trial_seed(seed, i, t),
            algorithms=tuple(algorithms),
            verify_outage=verify_outage,
            fading_trials=fading_trials,
        )
        for i, point_config in enumerate(point_configs)
        for t in range(trials)
    ]
    logger.info(
        f"Sweeping {axis} over {values} with {trials} trials per point "
        f"({len(tasks)} drops, {workers} worker(s))"
    )
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_trial, tasks, chunksize=max(1, trials // 4)))
    else:
        outcomes = [_run_trial(task) for task in tasks]

    report = SweepReport(axis=axis, values=values, trials=trials, seed=seed)
    for i, (value, point_config) in enumerate(zip(values, point_configs)):
        point_outcomes = [o for o in outcomes if o.point_index == i]
        for algorithm in algorithms:
            point = _aggregate(
                value,
                algorithm,
                point_outcomes,
                trials,
                point_config.p0,
                fading_trials,
                verify_outage,
            )
            report.points.append(point)
            logger.info(
                f"{axis}={value:g} {algorithm}: {point.mean_sum_rate:.3f} "
                f"+/- {point.stderr:.3f} ({point.excluded_trials} excluded)"
            )
    return report


def table_sweep(
    config: SystemConfig,
    nr_values: Sequence[int],
    j_values: Sequence[float],
    trials: Optional[int] = None,
    seed: Optional[int] = None,
    workers: int = 1,
) -> dict[int, SweepReport]:
    """Energy-budget sweeps for several antenna counts under one c0.

    Every antenna count sees the same drops (drop generation does not depend
    on N_R), which keeps the comparison between rows paired.
    """
    reports: dict[int, SweepReport] = {}
    for n_r in nr_values:
        base = config_for_point(config, "N_R", n_r)
        reports[int(n_r)] = monte_carlo_sweep(
            base, "J", j_values, trials=trials, seed=seed, workers=workers
        )
    return reports


def pivot_table(reports: dict[int, SweepReport], algorithm: str = FOUR_STEP) -> pd.DataFrame:
    """Mean sum rate with one row per J and one column per N_R."""
    rows = [
        {"J": p.axis_value, "N_R": n_r, "mean_sum_rate": p.mean_sum_rate}
        for n_r, report in reports.items()
        for p in report.series(algorithm)
    ]
    table = pd.DataFrame(rows).pivot(index="J", columns="N_R", values="mean_sum_rate")
    return table.sort_index(ascending=False)
