"""Synthetic ranking data from a Plackett-Luce utility model.

Each agent's realized utility for an alternative is exp(-||x_i - y_j||_2)
plus zero-mean Gumbel noise; a complete ranking is drawn by sequential
proportional-to-utility selection without replacement. Per-agent trust is
derived from the realized noise magnitudes: the quieter an agent's noise,
the higher its trust.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import rankdata

from .model import Dataset, Ranking, TrustVector

__all__ = [
    "PlackettLuceConfig",
    "sample_gumbel",
    "realized_utilities",
    "sample_ranking_from_utilities",
    "sample_dataset",
    "sample_dataset_with_noise",
    "derive_trust",
]

_EULER_GAMMA = float(np.euler_gamma)


@dataclass(frozen=True)
class PlackettLuceConfig:
    n: int
    m: int
    d: int = 2
    noise_scale: float = 1.0
    seed: int = 0
    latent_box: tuple[float, float] = (0.0, 1.0)
    # Fraction of agents whose Gumbel noise scale is multiplied by
    # noisy_multiplier; models a planted cluster of unreliable agents.
    noisy_fraction: float = 0.0
    noisy_multiplier: float = 5.0
    # Per-agent noise continuum: each agent's scale is further multiplied by
    # noise_spread ** v_i with v_i ~ U(0,1). At the default 1.0 all agents in
    # a block share one scale; larger values grade agent quality smoothly so
    # derived trust tracks a real quality ordering instead of breaking ties
    # between identically-noisy agents at random.
    noise_spread: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("agent count must be >= 1")
        if self.m < 2:
            raise ValueError("alternative count must be >= 2")
        if self.d < 1:
            raise ValueError("latent dimension must be >= 1")
        if self.noise_scale <= 0.0:
            raise ValueError("noise_scale must be positive")
        lo, hi = self.latent_box
        if not lo < hi:
            raise ValueError("latent_box must be a non-empty interval")
        if not 0.0 <= self.noisy_fraction <= 1.0:
            raise ValueError("noisy_fraction must lie in [0, 1]")
        if self.noisy_multiplier <= 0.0:
            raise ValueError("noisy_multiplier must be positive")
        if self.noise_spread <= 0.0:
            raise ValueError("noise_spread must be positive")


def sample_gumbel(scale: float, rng: np.random.Generator) -> float:
    """One zero-mean Gumbel draw: scale * (-ln(-ln U) - euler_gamma)."""
    if scale <= 0.0:
        raise ValueError("scale must be positive")
    u = rng.random()
    while u == 0.0:
        u = rng.random()
    return scale * (-np.log(-np.log(u)) - _EULER_GAMMA)


def _gumbel_array(scale: float, size, rng: np.random.Generator) -> np.ndarray:
    u = rng.random(size)
    u = np.where(u == 0.0, 0.5, u)  # measure-zero guard
    return scale * (-np.log(-np.log(u)) - _EULER_GAMMA)


def expected_utilities(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """exp(-||x - y_j||_2) for every alternative latent y_j."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 2 or y.shape[1] != x.shape[0]:
        raise ValueError("agent and alternative latent dimensions disagree")
    return np.exp(-np.linalg.norm(y - x[None, :], axis=1))


def realized_utilities(
    x: np.ndarray,
    y: np.ndarray,
    noise_scale: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Expected utilities plus fresh zero-mean Gumbel noise."""
    theta = expected_utilities(x, y)
    return theta + _gumbel_array(noise_scale, theta.shape, rng)


def sample_ranking_from_utilities(u: np.ndarray, rng: np.random.Generator) -> list[int]:
    """Sequential proportional-to-utility selection without replacement.

    Negative realized utilities (possible with large noise) are clamped to
    zero for the proportional draw; an all-nonpositive remainder falls back
    to a uniform draw.
    """
    u = np.asarray(u, dtype=float)
    remaining = list(range(len(u)))
    order: list[int] = []
    while remaining:
        w = np.maximum(u[remaining], 0.0)
        s = w.sum()
        if s <= 0.0:
            p = np.full(len(remaining), 1.0 / len(remaining))
        else:
            p = w / s
        pick = rng.choice(len(remaining), p=p)
        order.append(remaining.pop(pick))
    return order


def _noise_scales(cfg: PlackettLuceConfig, rng: np.random.Generator) -> np.ndarray:
    scales = np.full(cfg.n, cfg.noise_scale, dtype=float)
    n_noisy = int(np.ceil(cfg.noisy_fraction * cfg.n)) if cfg.noisy_fraction > 0 else 0
    if n_noisy:
        noisy = rng.choice(cfg.n, size=n_noisy, replace=False)
        scales[noisy] *= cfg.noisy_multiplier
    if cfg.noise_spread != 1.0:
        scales *= cfg.noise_spread ** rng.random(cfg.n)
    return scales


def sample_dataset_with_noise(cfg: PlackettLuceConfig) -> tuple[Dataset, np.ndarray]:
    """Generate a dataset and return the realized noise matrix alongside it.

    Per-agent generator streams are split from the master seed, so output is
    identical for a given seed regardless of evaluation order.
    """
    ss = np.random.SeedSequence(cfg.seed)
    master, *agent_seeds = ss.spawn(cfg.n + 1)
    rng = np.random.default_rng(master)
    lo, hi = cfg.latent_box
    x = rng.uniform(lo, hi, size=(cfg.n, cfg.d))
    y = rng.uniform(lo, hi, size=(cfg.m, cfg.d))
    scales = _noise_scales(cfg, rng)

    rankings = []
    noise = np.empty((cfg.n, cfg.m), dtype=float)
    for i in range(cfg.n):
        arng = np.random.default_rng(agent_seeds[i])
        eps = _gumbel_array(scales[i], cfg.m, arng)
        noise[i] = eps
        u = expected_utilities(x[i], y) + eps
        rankings.append(Ranking(agent=i, order=sample_ranking_from_utilities(u, arng)))
    ds = Dataset(m=cfg.m, rankings=tuple(rankings), latent_agents=x, latent_alternatives=y)
    return ds, noise


def sample_dataset(cfg: PlackettLuceConfig) -> Dataset:
    return sample_dataset_with_noise(cfg)[0]


def derive_trust(cfg: PlackettLuceConfig, realized_noise: np.ndarray) -> TrustVector:
    """Trust = 1 - rank-normalized mean absolute noise.

    The least-noisy agent gets trust 1, the noisiest gets 0; ties share the
    average rank. Order-preserving, bounded, and scale-free.
    """
    noise = np.asarray(realized_noise, dtype=float)
    if noise.ndim != 2 or noise.shape[0] != cfg.n:
        raise ValueError("noise matrix must have one row per agent")
    mean_abs = np.abs(noise).mean(axis=1)
    if cfg.n == 1:
        return TrustVector(np.ones(1))
    ranks = rankdata(mean_abs, method="average")  # 1..n, ties averaged
    return TrustVector(1.0 - (ranks - 1.0) / (cfg.n - 1.0))
