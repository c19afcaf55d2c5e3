"""Step 2: partition the DUE pairs into clusters (greedy MAX N-CUT)."""

import itertools
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from src.api.exceptions import DomainError, ScaleError
from src.api.utils.scenario import ScenarioDrop

logger = logging.getLogger(__name__)

ORACLE_MAX_DUES = 10
ORACLE_MAX_CLUSTERS = 3


@dataclass(frozen=True)
class ClusterAssignment:
    """Verdeling van de K DUE-paren over N clusters.

    ``cluster_of[k]`` is the (0-based) cluster of DUE k, ``members[n]`` the
    sorted DUE indices of cluster n.
    """

    cluster_of: tuple[int, ...]
    members: tuple[tuple[int, ...], ...]

    @classmethod
    def from_labels(cls, labels: "np.ndarray | list[int]", n_clusters: int) -> "ClusterAssignment":
        labels = [int(n) for n in labels]
        members = tuple(
            tuple(k for k, n in enumerate(labels) if n == cluster)
            for cluster in range(n_clusters)
        )
        return cls(cluster_of=tuple(labels), members=members)

    @property
    def n_clusters(self) -> int:
        return len(self.members)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {"due_index": range(len(self.cluster_of)), "cluster_index": self.cluster_of}
        )


def build_interference_graph(drop: ScenarioDrop) -> np.ndarray:
    """Weight matrix W with W[k', k] = alpha_{k',k} and a zero diagonal."""
    weights = np.array(drop.due_cross_gain, dtype=float, copy=True)
    np.fill_diagonal(weights, 0.0)
    return weights


def intra_cluster_weight(weights: np.ndarray, assignment: ClusterAssignment) -> float:
    """Sum over clusters of all ordered intra-cluster edge weights."""
    labels = np.asarray(assignment.cluster_of)
    same = labels[:, None] == labels[None, :]
    return float(np.sum(np.where(same, weights, 0.0)) - np.trace(weights))


def cluster_dues(weights: np.ndarray, N: int) -> ClusterAssignment:
    """Greedy clustering of the DUE interference graph.

    DUEs 0..N-1 seed clusters 0..N-1; every later DUE joins the cluster whose
    intra-cluster interference grows least, sum_{k' in C_n} (w[k,k'] + w[k',k]),
    ties going to the lowest cluster index.

    Raises:
        DomainError: if K < N or N < 1.
    """
    weights = np.asarray(weights, dtype=float)
    K = weights.shape[0]
    if N < 1 or K < N:
        raise DomainError(f"Need K >= N >= 1 to cluster, got K={K}, N={N}")

    symmetric = weights + weights.T
    labels = np.full(K, -1, dtype=int)
    labels[:N] = np.arange(N)
    for k in range(N, K):
        increase = np.array(
            [symmetric[k, labels == n].sum() for n in range(N)]
        )
        labels[k] = int(np.argmin(increase))
    assignment = ClusterAssignment.from_labels(labels, N)
    logger.debug(
        f"Clustered {K} DUEs into {N} clusters, intra-cluster weight "
        f"{intra_cluster_weight(weights, assignment):.4g}"
    )
    return assignment


def brute_force_partition_oracle(
    weights: np.ndarray, N: int
) -> tuple[ClusterAssignment, float]:
    """Exact minimiser of the intra-cluster weight over all partitions.

    Raises:
        ScaleError: beyond K = 10 or N = 3.
        DomainError: if K < N.
    """
    weights = np.asarray(weights, dtype=float)
    K = weights.shape[0]
    if K > ORACLE_MAX_DUES or N > ORACLE_MAX_CLUSTERS:
        raise ScaleError(
            f"Partition oracle is limited to K <= {ORACLE_MAX_DUES} and "
            f"N <= {ORACLE_MAX_CLUSTERS}, got K={K}, N={N}"
        )
    if N < 1 or K < N:
        raise DomainError(f"Need K >= N >= 1 to partition, got K={K}, N={N}")

    labels = np.array(list(itertools.product(range(N), repeat=K)), dtype=int)
    nonempty = np.all(
        np.stack([(labels == n).any(axis=1) for n in range(N)]), axis=0
    )
    labels = labels[nonempty]
    totals = np.zeros(len(labels))
    for i, j in itertools.permutations(range(K), 2):
        totals += np.where(labels[:, i] == labels[:, j], weights[i, j], 0.0)
    best = int(np.argmin(totals))
    return ClusterAssignment.from_labels(labels[best], N), float(totals[best])
