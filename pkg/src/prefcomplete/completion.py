"""Ranking completion from neighbor rankings.

The baseline aggregates pairwise majority votes; the certainty-weighted
variant additionally computes per-pair preference statistics from the
neighbor rankings and keeps only pairs that pass the three-way decision
gates, weighting each vote by the oriented preference mass.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Mapping, Optional, Sequence

import numpy as np

from .distance import feature_matrix
from .model import Dataset, Ranking, TrustVector
from .neighbors import NeighborQuery, anchor_knn, trust_anchor_knn
from .pairstats import (
    DEFAULT_RESOLUTION,
    DecisionThresholds,
    PairCounts,
    PreferenceTriple,
    certainty,
    conflict,
    pair_counts,
)

__all__ = [
    "vote_matrix",
    "pair_triples",
    "certainty_scores",
    "complete_ranking",
    "majority_completion",
    "complete_for_target",
    "COMPLETION_METHODS",
]

COMPLETION_METHODS = ("baseline", "certainty")


def vote_matrix(neighbor_rankings: Sequence[Ranking], m: int) -> np.ndarray:
    """Antisymmetric (m, m) tally: +1 per ranking placing j1 before j2."""
    v = np.zeros((m, m), dtype=np.int64)
    for r in neighbor_rankings:
        order = r.order
        if any(a >= m for a in order):
            raise ValueError(f"ranking references alternatives outside 0..{m - 1}")
        for i in range(len(order)):
            for j in range(i + 1, len(order)):
                v[order[i], order[j]] += 1
                v[order[j], order[i]] -= 1
    return v


@lru_cache(maxsize=65536)
def _certainty_cached(n_lo: float, n_hi: float, n_un: float, resolution: int) -> float:
    return certainty(PairCounts(n_lo, n_hi, n_un), resolution)


def _certainty_memo(pc: PairCounts, resolution: int) -> float:
    # Certainty is symmetric in (n_ab, n_ba); canonicalize the cache key.
    lo, hi = sorted((pc.n_ab, pc.n_ba))
    return _certainty_cached(lo, hi, pc.n_unordered, resolution)


def pair_triples(
    rankings: Sequence[Ranking],
    m: int,
    weights: Optional[Sequence[float]] = None,
    resolution: int = DEFAULT_RESOLUTION,
) -> dict[tuple[int, int], PreferenceTriple]:
    """Preference triples for every pair (a, b) with a < b, oriented a -> b.

    Certainty evaluations are memoized on the count triple, which repeats
    heavily across pairs and targets.
    """
    triples: dict[tuple[int, int], PreferenceTriple] = {}
    for a in range(m):
        for b in range(a + 1, m):
            pc = pair_counts(rankings, weights, a, b)
            if pc.total == 0.0:
                continue
            c_plus = _certainty_memo(pc, resolution)
            triples[(a, b)] = PreferenceTriple(
                p_plus=pc.n_ab / pc.total * c_plus,
                p_minus=pc.n_ba / pc.total * c_plus,
                c_minus=1.0 - c_plus,
                conflict=conflict(pc),
            )
    return triples


def oriented_triple(
    triples: Mapping[tuple[int, int], PreferenceTriple], j: int, t: int
) -> Optional[PreferenceTriple]:
    """Triple for the ordered pair (j, t); None when the pair has no evidence."""
    if j < t:
        return triples.get((j, t))
    tri = triples.get((t, j))
    return tri.swapped() if tri is not None else None


def certainty_scores(
    v: np.ndarray,
    triples: Mapping[tuple[int, int], PreferenceTriple],
    th: DecisionThresholds,
) -> np.ndarray:
    """Per-alternative scores: sum of v[j,t] * p_plus(j -> t) over pairs that
    pass the certainty and margin gates; gated-out pairs contribute 0."""
    m = v.shape[0]
    if v.shape != (m, m):
        raise ValueError("vote matrix must be square")
    scores = np.zeros(m, dtype=float)
    for j in range(m):
        for t in range(m):
            if j == t:
                continue
            tri = oriented_triple(triples, j, t)
            if tri is None:
                continue
            if tri.c_minus < th.epsilon1 and abs(tri.p_plus - tri.p_minus) >= th.epsilon2:
                scores[j] += v[j, t] * tri.p_plus
    return scores


def complete_ranking(scores: np.ndarray, agent: int = 0) -> Ranking:
    """Full permutation by descending score, ascending index on ties."""
    scores = np.asarray(scores, dtype=float)
    order = sorted(range(len(scores)), key=lambda j: (-scores[j], j))
    return Ranking(agent=agent, order=order)


def majority_completion(neighbor_rankings: Sequence[Ranking], m: int, agent: int = 0) -> Ranking:
    """Pairwise majority voting: rank by row sums of the vote matrix."""
    v = vote_matrix(neighbor_rankings, m)
    return complete_ranking(v.sum(axis=1).astype(float), agent=agent)


def complete_for_target(
    ds: Dataset,
    trust: Optional[TrustVector],
    target: int,
    k: int,
    method: str = "certainty",
    th: Optional[DecisionThresholds] = None,
    epsilon0: float = 0.0,
    resolution: int = DEFAULT_RESOLUTION,
    F: Optional[np.ndarray] = None,
    trust_weighted_counts: bool = False,
) -> Ranking:
    """Find trustworthy neighbors of the target and complete its ranking.

    ``F`` may carry a precomputed feature matrix. Empty rankings never enter
    the neighbor pool. Pair statistics for the certainty method are computed
    locally from the selected neighbors' rankings.
    """
    if method not in COMPLETION_METHODS:
        raise ValueError(f"unknown completion method {method!r}")
    if not 0 <= target < ds.n:
        raise ValueError(f"target {target} out of range")
    th = th or DecisionThresholds()
    if F is None:
        F = feature_matrix(ds)
    exclude = ds.empty_agents() - {target}
    q = NeighborQuery(target=target, k=k, epsilon0=epsilon0)
    if trust is None:
        neighbors = anchor_knn(F, q, exclude=exclude)
    else:
        neighbors = trust_anchor_knn(F, trust, q, exclude=exclude)
    neighbor_rankings = [ds.rankings[j] for j in neighbors.agents]
    if method == "baseline":
        return majority_completion(neighbor_rankings, ds.m, agent=target)
    weights = None
    if trust_weighted_counts and trust is not None:
        weights = [trust[j] for j in neighbors.agents]
    triples = pair_triples(neighbor_rankings, ds.m, weights=weights, resolution=resolution)
    v = vote_matrix(neighbor_rankings, ds.m)
    scores = certainty_scores(v, triples, th)
    return complete_ranking(scores, agent=target)
