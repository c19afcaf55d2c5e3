from src.api.utils.allocators.base import AllocationEngine, AllocationResult
from src.api.utils.allocators.four_step import FOUR_STEP, run_4sa, select_profile
from src.api.utils.allocators.loader import ALGORITHMS, load_allocator
from src.api.utils.allocators.random_allocation import RANDOM_ALLOCATION, run_ra_baseline

__all__ = [
    "ALGORITHMS",
    "AllocationEngine",
    "AllocationResult",
    "FOUR_STEP",
    "RANDOM_ALLOCATION",
    "load_allocator",
    "run_4sa",
    "run_ra_baseline",
    "select_profile",
]
