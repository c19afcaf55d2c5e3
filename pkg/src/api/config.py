import logging.config
import os
from pathlib import Path
from typing import Optional, Union

from dotenv import dotenv_values, load_dotenv
from pydantic import ValidationError

from src.api.exceptions import ConfigError
from src.api.models import SystemConfig

load_dotenv()


class Settings:
    """Applicatieconfiguratie voor de simulator en de bijbehorende API.

    Bevat standaardwaarden voor debugmodus, opslaglocaties, het standaard
    scenariobestand en de grenzen voor Monte-Carlo runs via de API.
    """

    DEBUG: bool = os.getenv("DEBUG", "true").lower() == "true"
    ALLOWED_ORIGINS = ["*"]

    DEFAULT_SCENARIO_FILE = os.getenv("DEFAULT_SCENARIO_FILE", "scenarios/freeway.env")
    DEFAULT_TRIALS = int(os.getenv("DEFAULT_TRIALS", "200"))
    DEFAULT_SEED = int(os.getenv("DEFAULT_SEED", "2020"))
    SWEEP_WORKERS = int(os.getenv("SWEEP_WORKERS", "1"))
    # Sweeps started over HTTP run inside the request, keep them small.
    MAX_API_TRIALS = int(os.getenv("MAX_API_TRIALS", "50"))

    DATABASE_URL = os.getenv("DATABASE_URL", "sqlite:///./data/d2dsim.db")

    # Base directory for data files (database, exported reports)
    DATA_DIR = os.getenv("DATA_DIR", "data")
    OUTPUT_DIR = os.getenv("OUTPUT_DIR", os.path.join(DATA_DIR, "results"))


settings: Settings = Settings()


def load_system_config(
    path: Optional[Union[str, Path]] = None, **overrides: object
) -> SystemConfig:
    """Load a scenario file into a validated SystemConfig.

    The file is a flat ``KEY=value`` list (``#`` starts a comment) with one key
    per SystemConfig field; keys that are left out take their defaults.

    Args:
        path (str | Path, optional): scenario file. Defaults to
            settings.DEFAULT_SCENARIO_FILE when it exists, else pure defaults.
        **overrides: field values that win over the file (CLI flags).

    Raises:
        ConfigError: if the file is missing, holds unknown keys or fails
            validation.

    Returns:
        SystemConfig: the validated scenario.
    """
    values: dict[str, object] = {}
    if path is None and os.path.exists(settings.DEFAULT_SCENARIO_FILE):
        path = settings.DEFAULT_SCENARIO_FILE
    if path is not None:
        if not os.path.isfile(path):
            raise ConfigError(f"Scenario file not found: {path}")
        raw = dotenv_values(path)
        unknown = sorted(set(raw) - set(SystemConfig.model_fields))
        if unknown:
            raise ConfigError(
                f"Unknown keys in {path}: {', '.join(unknown)}. "
                f"Supported keys are: {', '.join(SystemConfig.model_fields)}"
            )
        values.update({k: v for k, v in raw.items() if v not in (None, "")})
    values.update({k: v for k, v in overrides.items() if v is not None})

    try:
        config = SystemConfig.model_validate(values)
    except ValidationError as e:
        raise ConfigError(f"Invalid scenario configuration: {e}") from e
    logging.debug(f"Loaded scenario configuration from {path}: {config=}")
    return config


def setup_logging() -> None:
    """Configureer logging voor de applicatie.

    Stelt zowel een file- als streamhandler in, met DEBUG- of INFO-niveau
    afhankelijk van de configuratie. Logt naar 'app.log' en de console.
    """
    console_log_level = "DEBUG" if settings.DEBUG else "INFO"
    log_dir = os.getenv("LOG_DIR", "logs")
    os.makedirs(log_dir, exist_ok=True)
    logging.config.dictConfig(
        {
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": {
                "default": {
                    "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
                },
            },
            "handlers": {
                "file": {
                    "class": "logging.FileHandler",
                    "formatter": "default",
                    "level": "DEBUG",
                    "filename": os.path.join(log_dir, "app.log"),
                },
                "stream": {
                    "class": "logging.StreamHandler",
                    "formatter": "default",
                    "level": console_log_level,
                    "stream": "ext://sys.stdout",
                },
            },
            "root": {
                "level": "DEBUG",
                "handlers": ["file", "stream"],
            },
            "loggers": {
                # Plot backends are chatty at DEBUG level
                "matplotlib": {"level": "WARNING"},
                "PIL": {"level": "WARNING"},
                "python_multipart.multipart": {
                    "level": "WARNING",
                    "handlers": ["file", "stream"],
                    "propagate": False,
                },
            },
        }
    )

    logging.debug("Logging is configured.")
