import logging

from fastapi import APIRouter, Depends, HTTPException
from sqlalchemy.orm import Session

from src.api.config import load_system_config
from src.api.crud import create_sweep_run, get_sweep_run, get_sweep_runs
from src.api.dependencies import get_db
from src.api.dtos import SweepRequest, SweepRunDetailDto, SweepRunDto
from src.api.routers.errors import to_http_exception
from src.api.services.sweep import monte_carlo_sweep

logger = logging.getLogger(__name__)
sweeps_router = APIRouter(prefix="/sweeps", tags=["sweeps"])


@sweeps_router.post("")
def create_sweep(
    request: SweepRequest,
    db: Session = Depends(get_db),
) -> SweepRunDetailDto:
    """Run a small Monte-Carlo sweep in-process and store it."""
    try:
        config = load_system_config(None, **request.scenario)
        report = monte_carlo_sweep(
            config,
            request.axis,
            request.values,
            trials=request.trials,
            seed=request.seed,
            workers=1,
        )
        run = create_sweep_run(db, report, config)
    except Exception as e:
        raise to_http_exception(e, "Sweep")
    logger.info(f"Stored sweep {run.id} over {run.axis} ({len(run.points)} points)")
    return SweepRunDetailDto.model_validate(run)


@sweeps_router.get("")
def list_sweeps(
    limit: int = 50, offset: int = 0, db: Session = Depends(get_db)
) -> list[SweepRunDto]:
    return [SweepRunDto.model_validate(run) for run in get_sweep_runs(db, limit, offset)]


@sweeps_router.get("/{run_id}")
def get_sweep(run_id: str, db: Session = Depends(get_db)) -> SweepRunDetailDto:
    run = get_sweep_run(db, run_id)
    if run is None:
        raise HTTPException(status_code=404, detail="Sweep not found")
    return SweepRunDetailDto.model_validate(run)
