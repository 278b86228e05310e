"""Evaluation metrics: latent-feature RMSE over a neighbor set, ranking bias
against an oriented preference matrix, precision@5, and their weighted
combination."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Dataset, Ranking
from .neighbors import NeighborList

__all__ = [
    "MetricWeights",
    "UnsupportedMetricError",
    "rmse",
    "bias",
    "precision_at_5",
    "pre_score",
]


class UnsupportedMetricError(RuntimeError):
    """The dataset lacks what this metric needs (e.g. latent features)."""


@dataclass(frozen=True)
class MetricWeights:
    weight_a: float = 0.5  # precision@5
    weight_b: float = 0.5  # bias

    def __post_init__(self):
        if self.weight_a < 0 or self.weight_b < 0:
            raise ValueError("metric weights must be non-negative")
        if abs(self.weight_a + self.weight_b - 1.0) > 1e-12:
            raise ValueError("metric weights must sum to 1")


def rmse(neighbors: NeighborList, ds: Dataset, target: int) -> float:
    """sqrt of the mean squared latent distance from the target to its
    neighbors; synthetic data only."""
    if ds.latent_agents is None:
        raise UnsupportedMetricError("RMSE needs latent agent features")
    if len(neighbors) == 0:
        raise ValueError("RMSE over an empty neighbor list is undefined")
    x0 = ds.latent_agents[target]
    xs = ds.latent_agents[list(neighbors.agents)]
    return float(np.sqrt(np.mean(np.sum((xs - x0[None, :]) ** 2, axis=1))))


def bias(r: Ranking, p_plus: np.ndarray) -> float:
    """Agreement of a complete ranking with an oriented preference matrix.

    Numerator: sum of p_plus[r[i], r[j]] over ranked positions i < j.
    Denominator: pair count times the largest off-diagonal entry.
    """
    m = p_plus.shape[0]
    if p_plus.shape != (m, m):
        raise ValueError("preference matrix must be square")
    if len(r.order) != m:
        raise ValueError("bias needs a complete ranking")
    order = np.asarray(r.order)
    iu, ju = np.triu_indices(m, k=1)
    num = float(p_plus[order[iu], order[ju]].sum())
    off = p_plus[~np.eye(m, dtype=bool)]
    peak = float(off.max()) if off.size else 0.0
    if peak <= 0.0:
        return 0.0
    return num / (len(iu) * peak)


def precision_at_5(predicted: Ranking, truth: Ranking) -> float:
    """1 - KT/(N(N-1)) over the common alternatives of the two top-5
    prefixes; 1 when fewer than 2 alternatives are shared.

    The denominator is twice the pair count, so values lie in [0.5, 1] for
    N >= 2.
    """
    if len(predicted.order) == 0 or len(truth.order) == 0:
        raise ValueError("precision@5 needs non-empty rankings")
    top_p = predicted.order[:5]
    top_t = truth.order[:5]
    inter = set(top_p) & set(top_t)
    n = len(inter)
    if n < 2:
        return 1.0
    pos_p = {a: i for i, a in enumerate(top_p)}
    pos_t = {a: i for i, a in enumerate(top_t)}
    items = sorted(inter)
    kt = 0
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            a, b = items[i], items[j]
            if (pos_p[a] - pos_p[b]) * (pos_t[a] - pos_t[b]) < 0:
                kt += 1
    return 1.0 - kt / (n * (n - 1))


def pre_score(
    predicted: Ranking,
    truth: Ranking,
    p_plus: np.ndarray,
    w: MetricWeights = MetricWeights(),
) -> float:
    """weight_a * precision@5 + weight_b * bias."""
    return w.weight_a * precision_at_5(predicted, truth) + w.weight_b * bias(predicted, p_plus)
