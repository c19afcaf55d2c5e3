import math
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

MAX_ADC_BITS = 12


class SystemConfig(BaseModel):
    """Scenario-, constraint- en modelconstanten van een simulatie.

    Eén instantie beschrijft een volledige vrijwegsituatie: aantallen gebruikers,
    de BS-antennes en ADC-resoluties, het energiebudget, vermogensgrenzen, de
    betrouwbaarheidseis van de DUEs en de geometrie/kanaalconstanten. Alle
    vermogens zijn lineair in watt.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    M: int = Field(10, description="Number of CUEs")
    K: int = Field(30, description="Number of DUE pairs")
    N: Optional[int] = Field(None, description="Number of DUE clusters (defaults to M)")
    N_R: int = Field(32, description="BS antenna count")
    B_max: int = Field(7, description="Maximum ADC resolution in bits")

    c0: Optional[float] = Field(None, description="Energy per 2^b unit (default normalised)")
    c1: float = 0.0
    c0_reference_antennas: Optional[int] = Field(
        None, description="Antenna count at which J = 1 buys the all-B_max profile"
    )
    J: float = Field(0.5, description="BS energy budget")

    sigma2: float = Field(10 ** (-114 / 10) * 1e-3, description="Noise power [W]")
    P_max_c: float = Field(0.2, description="CUE power cap [W]")
    P_max_d: float = Field(0.2, description="DUE power cap [W]")
    gamma0_d: float = Field(10 ** (5 / 10), description="DUE SINR threshold (linear)")
    p0: float = Field(0.01, description="Maximum DUE outage probability")

    speed_kmh: float = 80.0
    lanes: int = 6
    lane_width_m: float = 4.0
    road_length_m: float = 2000.0
    bs_offset_m: float = 35.0
    headway_s: float = Field(2.5, description="Per-lane vehicle spacing in seconds")
    max_density_retries: int = 5

    v2i_intercept_db: float = 128.1
    v2i_slope_db: float = 37.6
    v2i_shadow_db: float = 8.0
    v2v_exponent: float = 3.68
    carrier_ghz: float = 2.0
    v2v_shadow_db: float = 3.0

    trials: int = 200
    seed: int = 2020

    @field_validator("M", "N_R", "lanes", "trials", "max_density_retries")
    def validate_at_least_one(cls, value: int) -> int:
        """Counts must be at least one."""
        if value < 1:
            raise ValueError(f"must be >= 1, got {value}")
        return value

    @field_validator("B_max")
    def validate_bits(cls, value: int) -> int:
        """ADC resolutions run from 1 to MAX_ADC_BITS."""
        if not 1 <= value <= MAX_ADC_BITS:
            raise ValueError(f"B_max must lie in [1, {MAX_ADC_BITS}], got {value}")
        return value

    @field_validator("p0")
    def validate_outage(cls, value: float) -> float:
        """The outage bound is a probability strictly inside (0, 1)."""
        if not 0.0 < value < 1.0:
            raise ValueError(f"p0 must lie in (0, 1), got {value}")
        return value

    @field_validator(
        "gamma0_d",
        "sigma2",
        "P_max_c",
        "P_max_d",
        "speed_kmh",
        "lane_width_m",
        "road_length_m",
        "headway_s",
        "J",
        "carrier_ghz",
        "v2v_exponent",
    )
    def validate_positive(cls, value: float) -> float:
        """Physical quantities that must be strictly positive."""
        if not (value > 0.0 and math.isfinite(value)):
            raise ValueError(f"must be a positive finite number, got {value}")
        return value

    @field_validator("v2i_shadow_db", "v2v_shadow_db", "bs_offset_m", "c1")
    def validate_non_negative(cls, value: float) -> float:
        """Shadowing spreads and offsets cannot be negative."""
        if value < 0.0:
            raise ValueError(f"must be >= 0, got {value}")
        return value

    @model_validator(mode="before")
    @classmethod
    def resolve_defaults(cls, data: object) -> object:
        """Fill N and c0 from the other fields when they are left out.

        c0 is normalised so that J = 1 corresponds to all reference antennas
        at B_max bits. The value is fixed here; copies made with
        ``model_copy(update=...)`` keep it.
        """
        if not isinstance(data, dict):
            return data
        data = dict(data)
        if data.get("N") in (None, ""):
            data["N"] = data.get("M", cls.model_fields["M"].default)
        if data.get("c0") in (None, ""):
            n_r = int(data.get("N_R", cls.model_fields["N_R"].default))
            b_max = int(data.get("B_max", cls.model_fields["B_max"].default))
            reference = data.get("c0_reference_antennas")
            reference = n_r if reference in (None, "") else int(reference)
            data["c0_reference_antennas"] = reference
            data["c0"] = 1.0 / (reference * 2**b_max)
        return data

    @model_validator(mode="after")
    def validate_counts(self) -> "SystemConfig":
        """K >= N >= 1 and c0 > 0."""
        if self.N is None or self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if self.K < self.N:
            raise ValueError(f"K ({self.K}) must be >= N ({self.N})")
        if self.c0 is None or not self.c0 > 0.0:
            raise ValueError(f"c0 must be > 0, got {self.c0}")
        return self

    @property
    def num_clusters(self) -> int:
        """N as a plain int."""
        assert self.N is not None
        return self.N

    @property
    def energy_c0(self) -> float:
        """c0 as a plain float."""
        assert self.c0 is not None
        return self.c0

    @property
    def speed_ms(self) -> float:
        """Vehicle speed in m/s."""
        return self.speed_kmh / 3.6

    @property
    def vehicle_density(self) -> float:
        """Per-lane vehicle density in vehicles per metre."""
        return 1.0 / (self.headway_s * self.speed_ms)
