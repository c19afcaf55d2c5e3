from datetime import datetime
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.api.config import settings
from src.api.models import MAX_ADC_BITS
from src.api.services.sweep import AXES


class AdcSearchRequest(BaseModel):
    """Request DTO for POST /api/v1/adc-search."""

    N_R: int = Field(..., ge=1)
    B_max: int = Field(..., ge=1, le=MAX_ADC_BITS)
    c0: float = Field(..., gt=0.0)
    c1: float = 0.0
    J: float = Field(..., gt=0.0)


class AdcSearchResponse(BaseModel):
    profile: list[int]
    energy: float
    psi1: float
    psi2: float


class ScenarioRequest(BaseModel):
    """Scenario overrides; unset fields take the defaults of the scenario file."""

    scenario: dict[str, object] = Field(default_factory=dict)
    seed: Optional[int] = None


class AllocationSummaryDto(BaseModel):
    algorithm: str
    sum_rate: float
    energy: float
    infeasible_pairs: int
    unmatched_cues: int
    profile: list[int]
    pairs: list[tuple[int, int]]
    cue_rates: list[float]


class DropAllocationResponse(BaseModel):
    drop_seed: int
    results: list[AllocationSummaryDto]


class SweepRequest(ScenarioRequest):
    """Request DTO for POST /api/v1/sweeps."""

    axis: str
    values: list[float] = Field(..., min_length=1)
    trials: int = Field(30, ge=1)

    @field_validator("axis")
    def validate_axis(cls, value: str) -> str:
        """Check that the axis is one of the sweepable fields."""
        if value not in AXES:
            raise ValueError(
                f"Unsupported axis: {value}. Supported: {', '.join(AXES)}"
            )
        return value

    @field_validator("trials")
    def validate_trials(cls, value: int) -> int:
        """Sweeps over HTTP run inside the request; cap the trial count."""
        if value > settings.MAX_API_TRIALS:
            raise ValueError(
                f"At most {settings.MAX_API_TRIALS} trials per point over the API, got {value}"
            )
        return value


class SweepPointDto(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    axis_value: float
    algorithm: str
    mean_sum_rate: Optional[float]
    stderr: float
    trials: int
    excluded_trials: int
    mean_energy: Optional[float]


class SweepRunDto(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    id: str
    created_at: datetime
    axis: str
    trials: int
    seed: int


class SweepRunDetailDto(SweepRunDto):
    scenario: dict[str, object]
    points: list[SweepPointDto]
