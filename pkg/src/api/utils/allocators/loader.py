from src.api.utils.allocators.base import AllocationEngine
from src.api.utils.allocators.four_step import FOUR_STEP, FourStepAllocator
from src.api.utils.allocators.random_allocation import (
    RANDOM_ALLOCATION,
    RandomAllocator,
)

ALGORITHMS = (FOUR_STEP, RANDOM_ALLOCATION)


def load_allocator(name: str = FOUR_STEP) -> AllocationEngine:
    """Load the allocation engine by its label.

    Args:
        name (str, optional): "4SA" or "RA". Defaults to "4SA".

    Raises:
        ValueError: if the algorithm is unknown.

    Returns:
        AllocationEngine: the engine.
    """
    if name == FOUR_STEP:
        return FourStepAllocator()
    elif name == RANDOM_ALLOCATION:
        return RandomAllocator()
    else:
        raise ValueError(f"Unknown allocation algorithm: {name}")
