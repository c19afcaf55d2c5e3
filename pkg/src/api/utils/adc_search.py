"""Step 1: choose the ADC resolution profile under the BS energy budget."""

import itertools
import logging
from typing import Callable, Optional

from src.api.exceptions import DomainError, Infeasible, ScaleError
from src.api.utils.quantization import ResolutionProfile, bs_energy, psi_stats

logger = logging.getLogger(__name__)

ORACLE_MAX_ANTENNAS = 10
ORACLE_MAX_BITS = 4

# Budgets are compared with a relative slack so that J = E_BS(L) counts as met
_BUDGET_RTOL = 1e-12


def _fits(profile: ResolutionProfile, c0: float, c1: float, J: float) -> bool:
    return bs_energy(profile, c0, c1) <= J * (1.0 + _BUDGET_RTOL)


def _check_dimensions(N_R: int, B_max: int) -> None:
    if N_R < 1:
        raise DomainError(f"N_R must be >= 1, got {N_R}")
    if B_max < 1:
        raise DomainError(f"B_max must be >= 1, got {B_max}")


def decremental_search(
    N_R: int, B_max: int, c0: float, c1: float, J: float
) -> ResolutionProfile:
    """Decremental search for the resolution profile.

    Starts from all antennas at B_max bits. While the current profile breaks the
    budget, one antenna is taken from the current top level x and moved to the
    highest lower level i whose profile meets the budget; if none does it
    moves to x - 1 and the search continues. The level x drops once it is
    empty.

    Args:
        N_R (int): number of BS antennas.
        B_max (int): highest ADC resolution.
        c0 (float): energy per 2^b unit.
        c1 (float): resolution-independent energy.
        J (float): energy budget.

    Raises:
        DomainError: on N_R or B_max below one.
        Infeasible: if even the all-1-bit profile exceeds J.

    Returns:
        ResolutionProfile: a profile with sum(L) = N_R and E_BS <= J.
    """
    _check_dimensions(N_R, B_max)
    floor = ResolutionProfile.uniform(N_R, B_max, 1)
    if not _fits(floor, c0, c1, J):
        raise Infeasible(
            f"Energy budget J={J:g} is below the all-1-bit energy "
            f"{bs_energy(floor, c0, c1):g} (N_R={N_R}, c0={c0:g}, c1={c1:g})"
        )

    counts = [0] * B_max
    counts[-1] = N_R
    x = B_max
    steps = 0
    while not _fits(ResolutionProfile(tuple(counts)), c0, c1, J) and x > 1:
        steps += 1
        counts[x - 1] -= 1
        for i in range(x - 1, 0, -1):
            candidate = list(counts)
            candidate[i - 1] += 1
            if _fits(ResolutionProfile(tuple(candidate)), c0, c1, J):
                counts = candidate
                break
        else:
            counts[x - 2] += 1
        while counts[x - 1] == 0 and x > 1:
            x -= 1

    profile = ResolutionProfile(tuple(counts))
    logger.debug(
        f"Decremental search: L={profile.counts} after {steps} steps, "
        f"E_BS={bs_energy(profile, c0, c1):.6g} <= J={J:g}"
    )
    return profile


def psi1_rate(profile: ResolutionProfile) -> float:
    """Rate surrogate for ranking profiles: psi1."""
    return psi_stats(profile)[0]


def exhaustive_profile_oracle(
    N_R: int,
    B_max: int,
    c0: float,
    c1: float,
    J: float,
    rate_eval: Optional[Callable[[ResolutionProfile], float]] = None,
) -> ResolutionProfile:
    """Enumerate every composition of N_R antennas over B_max levels.

    Only meant for small instances (tests, reports of the search gap).

    Raises:
        ScaleError: beyond N_R = 10 or B_max = 4.
        Infeasible: if no profile meets the budget.

    Returns:
        ResolutionProfile: the feasible profile maximising ``rate_eval``
        (psi1 by default); the first one enumerated wins ties.
    """
    _check_dimensions(N_R, B_max)
    if N_R > ORACLE_MAX_ANTENNAS or B_max > ORACLE_MAX_BITS:
        raise ScaleError(
            f"Exhaustive profile search is limited to N_R <= {ORACLE_MAX_ANTENNAS} "
            f"and B_max <= {ORACLE_MAX_BITS}, got N_R={N_R}, B_max={B_max}"
        )
    rate_eval = rate_eval or psi1_rate

    best: Optional[ResolutionProfile] = None
    best_rate = float("-inf")
    for bits in itertools.combinations_with_replacement(range(B_max), N_R):
        counts = [0] * B_max
        for level in bits:
            counts[level] += 1
        profile = ResolutionProfile(tuple(counts))
        if not _fits(profile, c0, c1, J):
            continue
        rate = rate_eval(profile)
        if rate > best_rate:
            best, best_rate = profile, rate
    if best is None:
        raise Infeasible(f"No resolution profile of {N_R} antennas fits J={J:g}")
    return best
