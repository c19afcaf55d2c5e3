import logging
import time

from fastapi import APIRouter

from src.api.config import load_system_config
from src.api.dtos import (
    AdcSearchRequest,
    AdcSearchResponse,
    AllocationSummaryDto,
    DropAllocationResponse,
    ScenarioRequest,
)
from src.api.routers.errors import to_http_exception
from src.api.utils.adc_search import decremental_search
from src.api.utils.allocators import ALGORITHMS, AllocationResult, load_allocator
from src.api.utils.quantization import bs_energy, psi_stats
from src.api.utils.scenario import generate_drop

logger = logging.getLogger(__name__)
simulation_router = APIRouter(tags=["simulation"])


def to_summary_dto(result: AllocationResult) -> AllocationSummaryDto:
    return AllocationSummaryDto(
        algorithm=result.algorithm,
        sum_rate=result.sum_rate,
        energy=result.energy,
        infeasible_pairs=result.infeasible_pairs,
        unmatched_cues=len(result.unmatched),
        profile=list(result.profile.counts),
        pairs=list(result.matching.pairs),
        cue_rates=[float(r) for r in result.cue_rates],
    )


@simulation_router.post("/adc-search")
def adc_search(request: AdcSearchRequest) -> AdcSearchResponse:
    """Resolution profile chosen by the decremental search for one energy budget.

    Raises:
        HTTPException: 409 when even all-1-bit ADCs exceed the budget.
    """
    try:
        profile = decremental_search(
            request.N_R, request.B_max, request.c0, request.c1, request.J
        )
    except Exception as e:
        raise to_http_exception(e, "ADC search")
    psi1, psi2 = psi_stats(profile)
    return AdcSearchResponse(
        profile=list(profile.counts),
        energy=bs_energy(profile, request.c0, request.c1),
        psi1=psi1,
        psi2=psi2,
    )


@simulation_router.post("/drops/allocate")
def allocate_drop(request: ScenarioRequest) -> DropAllocationResponse:
    """Run 4SA and the random baseline on one seeded drop.

    Args:
        request: scenario overrides and the drop seed (defaults to the
            scenario seed).

    Returns:
        DropAllocationResponse with one summary per algorithm.

    Raises:
        HTTPException: 422 on an invalid scenario, 409 on an infeasible budget.
    """
    start_time = time.perf_counter()
    try:
        config = load_system_config(None, **request.scenario)
        drop_seed = config.seed if request.seed is None else request.seed
        drop = generate_drop(config, drop_seed)
        results = [load_allocator(name).allocate(drop, config) for name in ALGORITHMS]
    except Exception as e:
        raise to_http_exception(e, "Drop allocation")

    elapsed_ms = int((time.perf_counter() - start_time) * 1000)
    logger.info(
        f"Allocated drop {drop_seed} ({config.M} CUEs, {config.K} DUEs) in {elapsed_ms}ms"
    )
    return DropAllocationResponse(
        drop_seed=drop_seed, results=[to_summary_dto(r) for r in results]
    )
