"""Step 3: closed-form powers for a CUE sharing its band with a DUE cluster.

The outage constraint Pr{SINR_k <= gamma0} <= p0 of every cluster DUE is
replaced by its Rayleigh upper bound, which is linear in the powers:

    alpha_k P_k - gamma_bar * sum_{k' != k} alpha_{k',k} P_k'
        >= gamma_bar * (P_c alpha_{m,k} + sigma^2),

with gamma_bar = gamma0 / -ln(1 - p0). The CUE rate decreases in every DUE
power, so the optimum meets all constraints with equality.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from src.api.exceptions import DomainError, SingularSystem
from src.api.models import SystemConfig
from src.api.utils.scenario import ScenarioDrop

logger = logging.getLogger(__name__)

RCOND_THRESHOLD = 1e-12
_CAP_RTOL = 1e-9


def gamma_bar(gamma0_d: float, p0: float) -> float:
    """Outage-transformed SINR threshold gamma0 / F^-1(p0) = gamma0 / -ln(1 - p0).

    Raises:
        DomainError: if p0 is not in (0, 1) or gamma0_d is negative.
    """
    if not 0.0 < p0 < 1.0:
        raise DomainError(f"Outage probability must lie in (0, 1), got {p0}")
    if gamma0_d < 0.0:
        raise DomainError(f"SINR threshold must be >= 0, got {gamma0_d}")
    return gamma0_d / -math.log1p(-p0)


@dataclass(frozen=True)
class PhiSystem:
    """Lineair stelsel Phi * P_d = gamma_bar * (P_c * alpha_m + sigma^2) van één cluster."""

    gamma_bar: float
    members: tuple[int, ...]
    Phi: np.ndarray
    phi_rows: np.ndarray  # rows of Phi^-1
    rcond: float
    alpha_m: Optional[np.ndarray] = None


@dataclass(frozen=True)
class PowerAllocation:
    """Vermogens van een (CUE, cluster)-paar; ``p_d`` volgt de volgorde van ``members``."""

    cue: int
    members: tuple[int, ...]
    p_c: float
    p_d: np.ndarray = field(repr=False)
    feasible: bool
    gamma_bar: float

    def to_row(self, cluster: int) -> dict[str, object]:
        """CSV row ``cue, cluster, p_c, p_d_1..``."""
        row: dict[str, object] = {"cue": self.cue, "cluster": cluster, "p_c": self.p_c}
        row.update({f"p_d_{i}": float(p) for i, p in enumerate(self.p_d, start=1)})
        row["feasible"] = self.feasible
        return row


def build_phi(
    cluster_members: Sequence[int],
    drop: ScenarioDrop,
    gamma_bar: float,
    m: Optional[int] = None,
) -> PhiSystem:
    """Build Phi (alpha_i on the diagonal, -gamma_bar * alpha_{j,i} off it).

    Args:
        cluster_members (Sequence[int]): DUE indices of the cluster.
        drop (ScenarioDrop): slow-fading coefficients.
        gamma_bar (float): transformed SINR threshold.
        m (int, optional): CUE index; fills ``alpha_m`` when given.

    Raises:
        DomainError: on an empty cluster.
        SingularSystem: if the reciprocal condition number is below 1e-12.

    Returns:
        PhiSystem: Phi, the rows of its inverse and the condition estimate.
    """
    members = tuple(int(k) for k in cluster_members)
    if not members:
        raise DomainError("Cannot build the power system of an empty cluster")
    idx = np.asarray(members)
    # cross[i, j] = alpha_{j,i}: interference from member j at member i's receiver
    cross = drop.due_cross_gain[np.ix_(idx, idx)].T
    Phi = -gamma_bar * cross
    np.fill_diagonal(Phi, drop.due_gain[idx])

    cond = np.linalg.cond(Phi)
    rcond = 0.0 if not np.isfinite(cond) else 1.0 / cond
    if rcond < RCOND_THRESHOLD:
        raise SingularSystem(
            f"Power system of cluster {members} is singular (rcond={rcond:.3g})"
        )
    alpha_m = None if m is None else drop.cue_due_gain[m, idx].copy()
    return PhiSystem(
        gamma_bar=gamma_bar,
        members=members,
        Phi=Phi,
        phi_rows=np.linalg.inv(Phi),
        rcond=rcond,
        alpha_m=alpha_m,
    )


def allocate_powers(
    m: int,
    cluster_members: Sequence[int],
    drop: ScenarioDrop,
    config: SystemConfig,
) -> PowerAllocation:
    """Optimal powers of CUE m sharing its band with one DUE cluster.

    P_c = min(P_max_c, min_i (P_max_d - gamma_bar sigma^2 phi_i.1) /
    (gamma_bar phi_i.alpha_m)) over the rows whose denominator is positive,
    and P_d = Phi^-1 gamma_bar (P_c alpha_m + sigma^2).

    Infeasibility (negative P_c or a DUE power outside [0, P_max_d]) is
    reported through ``feasible``.

    Raises:
        SingularSystem: propagated from build_phi.
    """
    g_bar = gamma_bar(config.gamma0_d, config.p0)
    system = build_phi(cluster_members, drop, g_bar, m=m)
    assert system.alpha_m is not None
    alpha_m = system.alpha_m
    sigma2 = config.sigma2

    slopes = g_bar * system.phi_rows @ alpha_m
    offsets = g_bar * sigma2 * system.phi_rows.sum(axis=1)
    bounded = slopes > 0.0
    candidates = (config.P_max_d - offsets[bounded]) / slopes[bounded]
    p_c = float(min(config.P_max_c, candidates.min())) if candidates.size else config.P_max_c

    rhs = g_bar * (p_c * alpha_m + sigma2)
    p_d = np.linalg.solve(system.Phi, rhs)

    cap = config.P_max_d * (1.0 + _CAP_RTOL)
    feasible = bool(p_c >= 0.0 and np.all(p_d >= 0.0) and np.all(p_d <= cap))
    if not feasible:
        logger.debug(
            f"CUE {m} with cluster {system.members} infeasible: "
            f"p_c={p_c:.3g}, p_d range [{p_d.min():.3g}, {p_d.max():.3g}]"
        )
    return PowerAllocation(
        cue=m,
        members=system.members,
        p_c=p_c,
        p_d=p_d,
        feasible=feasible,
        gamma_bar=g_bar,
    )


def equality_residual(
    allocation: PowerAllocation, drop: ScenarioDrop, sigma2: float
) -> float:
    """Relative residual ||Phi P_d - gamma_bar (P_c alpha_m + sigma^2)|| / ||rhs||."""
    system = build_phi(allocation.members, drop, allocation.gamma_bar, m=allocation.cue)
    assert system.alpha_m is not None
    rhs = allocation.gamma_bar * (allocation.p_c * system.alpha_m + sigma2)
    norm = float(np.linalg.norm(rhs))
    residual = float(np.linalg.norm(system.Phi @ allocation.p_d - rhs))
    return residual / norm if norm > 0.0 else residual
