"""Batch commands: sweeps, the energy-budget table and single-drop exports."""

import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, TypeVar

import click

from src.api.config import load_system_config, settings, setup_logging
from src.api.exceptions import ConfigError, Infeasible, SimulationError
from src.api.models import SystemConfig
from src.api.services.reporting import (
    plot_sweep,
    write_allocation_bundle,
    write_drop,
    write_sweep_csv,
    write_table,
)
from src.api.services.sweep import AXES, monte_carlo_sweep, table_sweep
from src.api.utils.adc_search import decremental_search
from src.api.utils.allocators import ALGORITHMS, load_allocator
from src.api.utils.quantization import bs_energy, psi_stats
from src.api.utils.scenario import generate_drop

logger = logging.getLogger(__name__)

EXIT_CONFIG_ERROR = 2
EXIT_INFEASIBLE = 3

T = TypeVar("T")


def parse_number(text: str) -> float:
    """Parse ``0.5``, ``4`` or a fraction such as ``1/64``."""
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as e:
        raise click.BadParameter(f"not a number: {text!r}") from e


def parse_list(text: str, cast: Callable[[float], T]) -> list[T]:
    values = [cast(parse_number(part)) for part in text.split(",") if part.strip()]
    if not values:
        raise click.BadParameter("expected a comma-separated list of values")
    return values


def load_config_or_exit(path: Optional[Path], **overrides: object) -> SystemConfig:
    try:
        return load_system_config(path, **overrides)
    except ConfigError as e:
        click.echo(f"Configuration error: {e}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)


def run_or_exit(action: Callable[[], T]) -> T:
    """Run ``action`` and map simulation errors to the documented exit codes."""
    try:
        return action()
    except Infeasible as e:
        click.echo(f"Infeasible: {e}", err=True)
        sys.exit(EXIT_INFEASIBLE)
    except SimulationError as e:
        logger.error(f"Simulation failed: {e}", exc_info=True)
        click.echo(f"Configuration error: {e}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)


config_option = click.option(
    "--config",
    "config_path",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Scenario file (KEY=value). Defaults to DEFAULT_SCENARIO_FILE.",
)
seed_option = click.option("--seed", type=int, default=None, help="Master seed.")


@click.group()
@click.option("--verbose", is_flag=True, help="Log at DEBUG level on the console.")
def cli(verbose: bool) -> None:
    """D2D uplink simulator with mixed-resolution ADCs at the base station."""
    if verbose:
        settings.DEBUG = True
    setup_logging()


@cli.command()
@config_option
@click.option("--axis", type=click.Choice(list(AXES)), required=True)
@click.option("--values", "values_text", required=True, help="Comma-separated axis values.")
@click.option("--trials", type=int, default=None, help="Drops per point.")
@click.option(
    "--out",
    "out_dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Output directory. Defaults to OUTPUT_DIR.",
)
@seed_option
@click.option("--workers", type=int, default=None, help="Worker processes.")
@click.option("--verify-outage", is_flag=True, help="Sample fading for matched clusters.")
@click.option("--store", is_flag=True, help="Also store the report in the results database.")
def simulate(
    config_path: Optional[Path],
    axis: str,
    values_text: str,
    trials: Optional[int],
    out_dir: Optional[Path],
    seed: Optional[int],
    workers: Optional[int],
    verify_outage: bool,
    store: bool,
) -> None:
    """Monte-Carlo sweep of 4SA and RA over one axis."""
    config = load_config_or_exit(config_path)
    values = parse_list(values_text, float)
    out_dir = out_dir or Path(settings.OUTPUT_DIR)
    report = run_or_exit(
        lambda: monte_carlo_sweep(
            config,
            axis,
            values,
            trials=trials,
            seed=seed,
            workers=workers or settings.SWEEP_WORKERS,
            verify_outage=verify_outage,
        )
    )
    csv_path = write_sweep_csv(report, out_dir / f"sweep_{axis}.csv")
    svg_path = plot_sweep(report, out_dir / f"sweep_{axis}.svg")
    click.echo(f"Wrote {csv_path} and {svg_path}")

    if store:
        from src.api.crud import create_sweep_run
        from src.api.dependencies import SessionLocal

        with SessionLocal() as db:
            run = create_sweep_run(db, report, config)
            click.echo(f"Stored sweep as {run.id}")


@cli.command()
@config_option
@click.option("--nr-values", "nr_text", default="16,32,64", show_default=True)
@click.option(
    "--j-values",
    "j_text",
    default="4,2,1,1/2,1/4,1/8,1/16,1/32,1/64",
    show_default=True,
)
@click.option("--trials", type=int, default=None)
@click.option(
    "--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), default=None
)
@seed_option
@click.option("--workers", type=int, default=None)
def table(
    config_path: Optional[Path],
    nr_text: str,
    j_text: str,
    trials: Optional[int],
    out_dir: Optional[Path],
    seed: Optional[int],
    workers: Optional[int],
) -> None:
    """Mean 4SA sum rate for every (N_R, J) combination."""
    config = load_config_or_exit(config_path)
    nr_values = parse_list(nr_text, int)
    j_values = parse_list(j_text, float)
    reports = run_or_exit(
        lambda: table_sweep(
            config,
            nr_values,
            j_values,
            trials=trials,
            seed=seed,
            workers=workers or settings.SWEEP_WORKERS,
        )
    )
    written = write_table(reports, out_dir or Path(settings.OUTPUT_DIR))
    click.echo(f"Wrote {', '.join(str(p) for p in written)}")


@cli.command("adc-search")
@click.option("--nr", type=int, required=True, help="BS antenna count.")
@click.option("--bmax", type=int, required=True, help="Maximum ADC resolution.")
@click.option("--c0", "c0_text", required=True, help="Energy per 2^b unit.")
@click.option("--c1", "c1_text", default="0", show_default=True)
@click.option("--budget", "budget_text", required=True, help="Energy budget J.")
def adc_search(nr: int, bmax: int, c0_text: str, c1_text: str, budget_text: str) -> None:
    """Print the resolution profile found by the decremental search."""
    c0, c1, budget = (parse_number(t) for t in (c0_text, c1_text, budget_text))
    profile = run_or_exit(lambda: decremental_search(nr, bmax, c0, c1, budget))
    psi1, psi2 = psi_stats(profile)
    click.echo(f"profile: {','.join(str(c) for c in profile.counts)}")
    click.echo(f"energy: {bs_energy(profile, c0, c1):.6g}")
    click.echo(f"psi1: {psi1:.6f}")
    click.echo(f"psi2: {psi2:.6f}")


@cli.command()
@config_option
@seed_option
@click.option(
    "--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), default=None
)
def allocate(config_path: Optional[Path], seed: Optional[int], out_dir: Optional[Path]) -> None:
    """Run 4SA and RA on one drop and export every intermediate table."""
    config = load_config_or_exit(config_path)
    drop_seed = config.seed if seed is None else seed
    drop = run_or_exit(lambda: generate_drop(config, drop_seed))
    results = run_or_exit(
        lambda: [load_allocator(name).allocate(drop, config) for name in ALGORITHMS]
    )
    out_dir = out_dir or Path(settings.OUTPUT_DIR) / f"drop_{drop_seed}"
    write_allocation_bundle(drop, results, out_dir)
    for result in results:
        click.echo(
            f"{result.algorithm}: sum rate {result.sum_rate:.4f} bit/s/Hz, "
            f"energy {result.energy:.4g}, {len(result.unmatched)} unmatched CUE(s)"
        )
    click.echo(f"Wrote tables to {out_dir}")


@cli.command("export-drop")
@config_option
@seed_option
@click.option("--out", "out_path", type=click.Path(dir_okay=False, path_type=Path), required=True)
def export_drop(config_path: Optional[Path], seed: Optional[int], out_path: Path) -> None:
    """Write the links of one drop to CSV."""
    config = load_config_or_exit(config_path)
    drop_seed = config.seed if seed is None else seed
    drop = run_or_exit(lambda: generate_drop(config, drop_seed))
    click.echo(f"Wrote {write_drop(drop, out_path)}")


if __name__ == "__main__":
    cli()
