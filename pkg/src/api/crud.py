import math
import uuid
from typing import Optional

from sqlalchemy.orm import Session

from src.api.database import SweepPointRecord, SweepRun
from src.api.models import SystemConfig
from src.api.services.sweep import SweepReport


def commit_session(db: Session) -> None:
    """Commit the session and handle any errors."""
    try:
        db.commit()
    except Exception as e:
        db.rollback()
        raise e


def _nullable(value: float) -> Optional[float]:
    return None if math.isnan(value) else value


def create_sweep_run(
    db: Session, report: SweepReport, config: SystemConfig
) -> SweepRun:
    """Persist a sweep report with all of its points."""
    run = SweepRun(
        id=uuid.uuid4().hex,
        axis=report.axis,
        trials=report.trials,
        seed=report.seed,
        scenario=config.model_dump(mode="json"),
    )
    run.points = [
        SweepPointRecord(
            axis_value=p.axis_value,
            algorithm=p.algorithm,
            mean_sum_rate=_nullable(p.mean_sum_rate),
            stderr=p.stderr,
            trials=p.trials,
            excluded_trials=p.excluded_trials,
            mean_energy=_nullable(p.mean_energy),
        )
        for p in report.points
    ]
    db.add(run)
    commit_session(db)
    db.refresh(run)
    return run


def get_sweep_run(db: Session, run_id: str) -> Optional[SweepRun]:
    return db.query(SweepRun).filter(SweepRun.id == run_id).first()


def get_sweep_runs(db: Session, limit: int = 50, offset: int = 0) -> list[SweepRun]:
    return (
        db.query(SweepRun)
        .order_by(SweepRun.created_at.desc())
        .limit(limit)
        .offset(offset)
        .all()
    )
