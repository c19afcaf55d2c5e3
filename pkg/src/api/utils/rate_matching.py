"""Step 4: CUE ergodic rates per (CUE, cluster) pair and the spectrum matching."""

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy.optimize import linear_sum_assignment

from src.api.exceptions import DomainError, ScaleError, SingularSystem
from src.api.models import SystemConfig
from src.api.utils.clustering import ClusterAssignment
from src.api.utils.power_control import PowerAllocation, allocate_powers
from src.api.utils.quantization import ResolutionProfile, psi_stats
from src.api.utils.scenario import ScenarioDrop

logger = logging.getLogger(__name__)

ORACLE_MAX_SIZE = 8


def cue_ergodic_rate(
    m: int,
    cluster_members: "tuple[int, ...] | list[int]",
    powers: PowerAllocation,
    psi1: float,
    psi2: float,
    drop: ScenarioDrop,
    sigma2: float,
) -> float:
    """Approximate ergodic rate of CUE m after MRC behind the mixed-ADC front end.

    R = log2(1 + P_c a^2 (psi1^2 + psi2) / (nu psi1 - 2 P_c a^2 psi2)) with
    a = alpha_{m,B} and nu = sigma^2 a + sum_k P_k a alpha_{k,B} + 2 P_c a^2.
    The denominator is evaluated as (sigma^2 + I) a psi1 + 2 P_c a^2 (psi1 - psi2),
    which is the same quantity without the cancellation of the two P_c terms.

    Raises:
        DomainError: if the denominator is not positive.

    Returns:
        float: rate in bit/s/Hz; 0 when P_c = 0.
    """
    if powers.p_c <= 0.0:
        return 0.0
    alpha = float(drop.cue_bs_gain[m])
    members = np.asarray(cluster_members, dtype=int)
    interference = float(np.dot(powers.p_d, drop.due_bs_gain[members])) if members.size else 0.0
    signal = powers.p_c * alpha**2 * (psi1**2 + psi2)
    denominator = (sigma2 + interference) * alpha * psi1 + 2.0 * powers.p_c * alpha**2 * (
        psi1 - psi2
    )
    if not denominator > 0.0:
        raise DomainError(
            f"Non-positive SIQNR denominator {denominator:g} for CUE {m} "
            f"(psi1={psi1:g}, psi2={psi2:g}, sigma2={sigma2:g})"
        )
    return math.log2(1.0 + signal / denominator)


@dataclass(frozen=True)
class RateMatrix:
    """M x N CUE rates, -inf where the pair has no feasible power allocation."""

    rates: np.ndarray
    allocations: dict[tuple[int, int], PowerAllocation] = field(repr=False)

    @property
    def infeasible_pairs(self) -> int:
        return int(np.sum(~np.isfinite(self.rates)))

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(
            self.rates,
            columns=[f"cluster_{n}" for n in range(self.rates.shape[1])],
        )
        frame.index.name = "cue"
        return frame


def build_rate_matrix(
    drop: ScenarioDrop,
    clusters: ClusterAssignment,
    profile: ResolutionProfile,
    config: SystemConfig,
) -> RateMatrix:
    """Allocate powers and evaluate the CUE rate for every (CUE, cluster) pair."""
    psi1, psi2 = psi_stats(profile)
    rates = np.full((drop.M, clusters.n_clusters), -np.inf)
    allocations: dict[tuple[int, int], PowerAllocation] = {}
    for m in range(drop.M):
        for n, members in enumerate(clusters.members):
            try:
                allocation = allocate_powers(m, members, drop, config)
            except SingularSystem as e:
                logger.warning(f"Skipping CUE {m} / cluster {n}: {e}")
                continue
            allocations[(m, n)] = allocation
            if allocation.feasible:
                rates[m, n] = cue_ergodic_rate(
                    m, members, allocation, psi1, psi2, drop, config.sigma2
                )
    return RateMatrix(rates=rates, allocations=allocations)


@dataclass(frozen=True)
class Matching:
    """Resultaat van de spectrumtoewijzing: CUE -> cluster."""

    pairs: tuple[tuple[int, int], ...]
    unmatched: tuple[int, ...]
    total: float

    def cluster_of(self, m: int) -> "int | None":
        return next((n for cue, n in self.pairs if cue == m), None)


def _forbidden_penalty(rates: np.ndarray) -> float:
    finite = rates[np.isfinite(rates)]
    scale = float(np.abs(finite).sum()) if finite.size else 0.0
    return -(scale + 1.0) * (min(rates.shape) + 1)


def _best_total(weights: np.ndarray, rows: list[int], cols: list[int]) -> float:
    if not rows or not cols:
        return 0.0
    sub = weights[np.ix_(rows, cols)]
    r, c = linear_sum_assignment(sub, maximize=True)
    return float(sub[r, c].sum())


def _lowest_index_assignment(
    weights: np.ndarray, tol: float
) -> list[tuple[int, int]]:
    """Lexicographically first optimal assignment, row by row.

    Each row takes the lowest free column that still admits an optimal
    completion of the remaining rows; a row with no such column stays free.
    """
    n_rows, n_cols = weights.shape
    best = _best_total(weights, list(range(n_rows)), list(range(n_cols)))
    free_cols = list(range(n_cols))
    fixed = 0.0
    pairs: list[tuple[int, int]] = []
    for m in range(n_rows):
        rest = list(range(m + 1, n_rows))
        for n in free_cols:
            remaining = [c for c in free_cols if c != n]
            completion = _best_total(weights, rest, remaining)
            if fixed + weights[m, n] + completion >= best - tol:
                pairs.append((m, n))
                fixed += float(weights[m, n])
                free_cols = remaining
                break
    return pairs


def hungarian_match(rates: np.ndarray) -> Matching:
    """Maximum-weight one-to-one matching of CUEs (rows) to clusters (columns).

    -inf entries are replaced by a penalty larger than any sum of finite
    entries, so they are only selected when no matching of finite pairs covers
    those rows; such CUEs are reported unmatched. Rectangular matrices leave
    the surplus rows unmatched. Among tied optima the assignment whose column
    sequence (row 0 first) is lexicographically smallest is returned.
    """
    rates = np.asarray(rates, dtype=float)
    if rates.size == 0:
        return Matching(pairs=(), unmatched=tuple(range(rates.shape[0])), total=0.0)
    weights = np.where(np.isfinite(rates), rates, _forbidden_penalty(rates))
    finite = rates[np.isfinite(rates)]
    tol = 1e-9 * (float(np.abs(finite).sum()) + 1.0)
    pairs = tuple(
        (m, n)
        for m, n in _lowest_index_assignment(weights, tol)
        if np.isfinite(rates[m, n])
    )
    matched = {m for m, _ in pairs}
    unmatched = tuple(m for m in range(rates.shape[0]) if m not in matched)
    total = float(sum(rates[m, n] for m, n in pairs))
    if unmatched:
        logger.debug(f"Matching left CUEs {unmatched} without a feasible cluster")
    return Matching(pairs=pairs, unmatched=unmatched, total=total)


def brute_force_match_oracle(rates: np.ndarray) -> Matching:
    """Enumerate every one-to-one assignment; the lexicographically first optimum wins.

    Raises:
        ScaleError: for more than 8 rows or columns.
    """
    rates = np.asarray(rates, dtype=float)
    n_rows, n_cols = rates.shape
    if max(n_rows, n_cols) > ORACLE_MAX_SIZE:
        raise ScaleError(
            f"Matching oracle is limited to {ORACLE_MAX_SIZE}x{ORACLE_MAX_SIZE}, "
            f"got {n_rows}x{n_cols}"
        )
    size = min(n_rows, n_cols)
    if size == 0:
        return Matching(pairs=(), unmatched=tuple(range(n_rows)), total=0.0)
    col_perms = np.array(list(itertools.permutations(range(n_cols), size)), dtype=int)
    col_perms = col_perms.reshape(-1, size)
    best_pairs: tuple[tuple[int, int], ...] = ()
    best_key: tuple[int, float] = (-1, -math.inf)
    for row_set in itertools.combinations(range(n_rows), size):
        entries = rates[np.asarray(row_set, dtype=int)[None, :], col_perms]
        finite = np.isfinite(entries)
        counts = finite.sum(axis=1)
        totals = np.where(finite, entries, 0.0).sum(axis=1)
        # more finite pairs first, then the larger total, then the first permutation
        candidates = np.flatnonzero(counts == counts.max())
        i = int(candidates[np.argmax(totals[candidates])])
        key = (int(counts[i]), float(totals[i]))
        if key > best_key:
            best_key = key
            best_pairs = tuple(
                (m, int(n))
                for m, n, ok in zip(row_set, col_perms[i], finite[i])
                if ok
            )
    matched = {m for m, _ in best_pairs}
    return Matching(
        pairs=best_pairs,
        unmatched=tuple(m for m in range(n_rows) if m not in matched),
        total=float(best_key[1]) if best_pairs else 0.0,
    )
