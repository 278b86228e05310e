"""k-nearest-neighbor search over rankings.

Three variants: plain Kendall-Tau kNN, anchor kNN (distances averaged over
third-party anchor agents), and trust-weighted anchor kNN which excludes
untrustworthy agents outright and discounts the rest by their trust.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .model import TrustVector

__all__ = [
    "NeighborQuery",
    "NeighborList",
    "NoCandidatesError",
    "kt_knn",
    "anchor_distance",
    "anchor_distances",
    "anchor_knn",
    "trust_anchor_knn",
]


class NoCandidatesError(RuntimeError):
    """Every candidate agent was excluded (trust cutoff and/or exclusions)."""


@dataclass(frozen=True)
class NeighborQuery:
    target: int
    k: int
    epsilon0: float = 0.0

    def __post_init__(self):
        if self.target < 0:
            raise ValueError("target agent index must be non-negative")
        if self.k < 1:
            raise ValueError("k must be positive")
        if not 0.0 <= self.epsilon0 < 1.0:
            raise ValueError("epsilon0 must lie in [0, 1)")


@dataclass(frozen=True)
class NeighborList:
    """Agents ordered by ascending distance, ties broken by agent index."""

    agents: tuple[int, ...]
    distances: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.agents)


def _take_k(distances: np.ndarray, candidates: np.ndarray, k: int) -> NeighborList:
    order = np.lexsort((candidates, distances))[:k]
    return NeighborList(
        agents=tuple(int(candidates[i]) for i in order),
        distances=tuple(float(distances[i]) for i in order),
    )


def _candidate_mask(n: int, target: int, exclude: Optional[set[int]]) -> np.ndarray:
    mask = np.ones(n, dtype=bool)
    mask[target] = False
    if exclude:
        mask[list(exclude)] = False
    return mask


def kt_knn(F: np.ndarray, q: NeighborQuery, exclude: Optional[set[int]] = None) -> NeighborList:
    """The k agents closest to the target in raw Kendall-Tau distance."""
    n = F.shape[0]
    if q.k > n - 1:
        raise ValueError(f"k={q.k} exceeds candidate count {n - 1}")
    mask = _candidate_mask(n, q.target, exclude)
    candidates = np.flatnonzero(mask)
    if candidates.size == 0:
        raise NoCandidatesError("no candidate agents remain")
    return _take_k(F[q.target, candidates], candidates, q.k)


def anchor_distance(F: np.ndarray, i: int, j: int) -> float:
    """Mean |F[i,t] - F[j,t]| over all anchor agents t not in {i, j}."""
    n = F.shape[0]
    if n < 3:
        raise ValueError("anchor distance needs at least 3 agents")
    if i == j:
        raise ValueError("anchor distance is defined only for i != j")
    mask = np.ones(n, dtype=bool)
    mask[i] = False
    mask[j] = False
    return float(np.abs(F[i, mask] - F[j, mask]).sum() / (n - 2))


def anchor_distances(F: np.ndarray, i: int) -> np.ndarray:
    """anchor_distance(F, i, j) for every j; entry i is set to +inf."""
    n = F.shape[0]
    if n < 3:
        raise ValueError("anchor distance needs at least 3 agents")
    M = np.abs(F[i][None, :] - F)  # M[j, t] = |F[i,t] - F[j,t]|
    M[:, i] = 0.0
    D = (M.sum(axis=1) - np.diagonal(M)) / (n - 2)
    D[i] = np.inf
    return D


def anchor_knn(F: np.ndarray, q: NeighborQuery, exclude: Optional[set[int]] = None) -> NeighborList:
    """The k agents minimizing the anchor distance to the target."""
    n = F.shape[0]
    if q.k > n - 1:
        raise ValueError(f"k={q.k} exceeds candidate count {n - 1}")
    D = anchor_distances(F, q.target)
    mask = _candidate_mask(n, q.target, exclude)
    candidates = np.flatnonzero(mask)
    if candidates.size == 0:
        raise NoCandidatesError("no candidate agents remain")
    return _take_k(D[candidates], candidates, q.k)


def trust_anchor_knn(
    F: np.ndarray,
    trust: Optional[TrustVector],
    q: NeighborQuery,
    exclude: Optional[set[int]] = None,
) -> NeighborList:
    """Anchor kNN with trust: agents with trust <= epsilon0 (or zero trust)
    are removed from candidacy, and the remaining anchor distances are
    divided by the candidate's trust.

    Absent trust means trust = 1 for everyone, which reduces exactly to
    :func:`anchor_knn`. Excluded agents still serve as anchors in the
    distance sums; only their candidacy is revoked.
    """
    n = F.shape[0]
    if q.k > n - 1:
        raise ValueError(f"k={q.k} exceeds candidate count {n - 1}")
    if trust is None:
        t = np.ones(n, dtype=float)
    else:
        if len(trust) != n:
            raise ValueError("trust vector length does not match agent count")
        t = trust.values
    D = anchor_distances(F, q.target)
    mask = _candidate_mask(n, q.target, exclude)
    # trust == 0 is untrustworthy by definition even when epsilon0 == 0,
    # which also keeps the division below finite.
    mask &= (t > q.epsilon0) & (t > 0.0)
    candidates = np.flatnonzero(mask)
    if candidates.size == 0:
        raise NoCandidatesError(
            f"all candidates have trust <= epsilon0={q.epsilon0} or were excluded"
        )
    return _take_k(D[candidates] / t[candidates], candidates, q.k)
