"""CSV and SVG output of sweeps and single-drop allocations."""

import logging
from pathlib import Path
from typing import Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from src.api.services.sweep import SweepReport, pivot_table  # noqa: E402
from src.api.utils.allocators import AllocationResult  # noqa: E402
from src.api.utils.scenario import ScenarioDrop  # noqa: E402

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

AXIS_LABELS = {
    "speed": "Vehicle speed [km/h]",
    "J": "Energy budget J",
    "N_R": "BS antennas N_R",
    "p0": "DUE outage probability p0",
}
_MARKERS = {"4SA": "-o", "RA": "-s"}


def _ensure_parent(path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_sweep_csv(report: SweepReport, path: PathLike) -> Path:
    path = _ensure_parent(path)
    report.to_frame().to_csv(path, index=False)
    logger.info(f"Wrote sweep over {report.axis} to {path}")
    return path


def plot_sweep(report: SweepReport, path: PathLike) -> Path:
    """Sum rate against the swept axis, one error-bar curve per algorithm."""
    path = _ensure_parent(path)
    fig, ax = plt.subplots(figsize=(8, 5))
    for algorithm in sorted({p.algorithm for p in report.points}):
        series = report.series(algorithm)
        ax.errorbar(
            [p.axis_value for p in series],
            [p.mean_sum_rate for p in series],
            yerr=[p.stderr for p in series],
            fmt=_MARKERS.get(algorithm, "-x"),
            capsize=3,
            label=algorithm,
        )
    if report.axis in ("J", "p0"):
        ax.set_xscale("log")
    ax.set_xlabel(AXIS_LABELS.get(report.axis, report.axis))
    ax.set_ylabel("Sum of CUE ergodic rates [bit/s/Hz]")
    ax.set_title(f"{report.trials} drops per point, seed {report.seed}")
    ax.grid(True)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    logger.info(f"Wrote plot {path}")
    return path


def write_table(reports: dict[int, SweepReport], out_dir: PathLike) -> list[Path]:
    """Per-N_R sweep CSVs, the J x N_R pivot ``table.csv`` and ``table.svg``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [
        write_sweep_csv(report, out_dir / f"sweep_J_nr{n_r}.csv")
        for n_r, report in reports.items()
    ]
    table = pivot_table(reports)
    table_path = out_dir / "table.csv"
    table.to_csv(table_path)
    written.append(table_path)

    fig, ax = plt.subplots(figsize=(8, 5))
    for n_r, report in sorted(reports.items()):
        series = report.series("4SA")
        ax.errorbar(
            [p.axis_value for p in series],
            [p.mean_sum_rate for p in series],
            yerr=[p.stderr for p in series],
            fmt="-o",
            capsize=3,
            label=f"N_R = {n_r}",
        )
    ax.set_xscale("log", base=2)
    ax.set_xlabel(AXIS_LABELS["J"])
    ax.set_ylabel("Sum of CUE ergodic rates [bit/s/Hz]")
    ax.grid(True)
    ax.legend()
    fig.tight_layout()
    svg_path = out_dir / "table.svg"
    fig.savefig(svg_path, format="svg")
    plt.close(fig)
    written.append(svg_path)
    logger.info(f"Wrote energy-budget table to {out_dir}")
    return written


def allocation_frames(result: AllocationResult) -> dict[str, pd.DataFrame]:
    """Profile, clusters, powers and rates of one allocation as frames."""
    profile = pd.DataFrame([result.profile.to_row()])
    powers = pd.DataFrame(
        [result.powers[m].to_row(n) for m, n in result.matching.pairs]
    )
    rates = (
        result.rate_matrix.to_frame().reset_index()
        if result.rate_matrix is not None
        else pd.DataFrame()
    )
    assignment = pd.DataFrame(
        {
            "cue": range(len(result.cue_rates)),
            "cluster": [result.matching.cluster_of(m) for m in range(len(result.cue_rates))],
            "rate": result.cue_rates,
        }
    )
    return {
        "profile": profile,
        "clusters": result.clusters.to_frame(),
        "allocations": powers,
        "rates": rates,
        "assignment": assignment,
    }


def write_allocation_bundle(
    drop: ScenarioDrop, results: list[AllocationResult], out_dir: PathLike
) -> list[Path]:
    """Write drop.csv and per-algorithm tables plus summary.csv for one drop.

    Files of the first result are written without suffix; the others get an
    ``_<algorithm>`` suffix (``allocations_RA.csv``).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    drop_path = out_dir / "drop.csv"
    drop.to_frame().to_csv(drop_path, index=False)
    written.append(drop_path)

    for i, result in enumerate(results):
        suffix = "" if i == 0 else f"_{result.algorithm}"
        for name, frame in allocation_frames(result).items():
            path = out_dir / f"{name}{suffix}.csv"
            frame.to_csv(path, index=False)
            written.append(path)

    summary_path = out_dir / "summary.csv"
    pd.DataFrame([r.summary() for r in results]).to_csv(summary_path, index=False)
    written.append(summary_path)
    logger.info(f"Wrote {len(written)} files for drop {drop.drop_seed} to {out_dir}")
    return written


def write_drop(drop: ScenarioDrop, path: PathLike) -> Path:
    path = _ensure_parent(path)
    drop.to_frame().to_csv(path, index=False)
    logger.info(f"Wrote drop {drop.drop_seed} ({drop.M} CUEs, {drop.K} DUEs) to {path}")
    return path
