from datetime import datetime
from typing import List, Optional

from sqlalchemy import JSON, Float, ForeignKey, Integer, String, Text, func
from sqlalchemy.orm import (
    DeclarativeBase,
    Mapped,
    mapped_column,
    relationship,
)


class Base(DeclarativeBase):
    pass


class SweepRun(Base):
    """Eén opgeslagen Monte-Carlo sweep."""

    __tablename__ = "sweep_runs"

    id: Mapped[str] = mapped_column(String(32), primary_key=True)
    created_at: Mapped[datetime] = mapped_column(server_default=func.now())
    axis: Mapped[str] = mapped_column(Text, nullable=False)
    trials: Mapped[int] = mapped_column(Integer, nullable=False)
    seed: Mapped[int] = mapped_column(Integer, nullable=False)
    scenario: Mapped[dict] = mapped_column(JSON, nullable=False)

    # Relationships
    points: Mapped[List["SweepPointRecord"]] = relationship(
        back_populates="run",
        cascade="all, delete-orphan",
        order_by="SweepPointRecord.id",
    )


class SweepPointRecord(Base):
    """Eén punt (waarde op de sweep-as, algoritme) van een sweep."""

    __tablename__ = "sweep_points"

    id: Mapped[int] = mapped_column(primary_key=True, autoincrement=True)
    run_id: Mapped[str] = mapped_column(String(32), ForeignKey("sweep_runs.id"))
    axis_value: Mapped[float] = mapped_column(Float, nullable=False)
    algorithm: Mapped[str] = mapped_column(String(8), nullable=False)
    mean_sum_rate: Mapped[Optional[float]] = mapped_column(Float, nullable=True)
    stderr: Mapped[float] = mapped_column(Float, nullable=False)
    trials: Mapped[int] = mapped_column(Integer, nullable=False)
    excluded_trials: Mapped[int] = mapped_column(Integer, nullable=False)
    mean_energy: Mapped[Optional[float]] = mapped_column(Float, nullable=True)

    # Relationship
    run: Mapped["SweepRun"] = relationship(back_populates="points")
