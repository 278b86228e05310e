"""Core domain types: rankings, datasets, and per-agent trust values.

Agents and alternatives are dense integer indices everywhere; human-readable
names live only in the I/O layer. All types are immutable value data after
construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "Ranking",
    "Dataset",
    "TrustVector",
    "rank_position",
    "common_alternatives",
]


@dataclass(frozen=True)
class Ranking:
    """One agent's strict (possibly partial) order, most-preferred first."""

    agent: int
    order: tuple[int, ...]

    def __init__(self, agent: int, order: Iterable[int]):
        order = tuple(int(a) for a in order)
        if agent < 0:
            raise ValueError(f"agent index must be non-negative, got {agent}")
        if any(a < 0 for a in order):
            raise ValueError(f"alternative ids must be non-negative: {order}")
        if len(set(order)) != len(order):
            raise ValueError(f"duplicate alternative in ranking: {order}")
        object.__setattr__(self, "agent", int(agent))
        object.__setattr__(self, "order", order)

    def __len__(self) -> int:
        return len(self.order)

    @property
    def is_empty(self) -> bool:
        return len(self.order) == 0


@dataclass(frozen=True)
class Dataset:
    """A collection of rankings over ``m`` alternatives.

    ``latent_agents`` (n x d) and ``latent_alternatives`` (m x d) are optional
    and only present for synthetic data.
    """

    m: int
    rankings: tuple[Ranking, ...]
    latent_agents: Optional[np.ndarray] = field(default=None, compare=False)
    latent_alternatives: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"alternative count must be >= 1, got {self.m}")
        object.__setattr__(self, "rankings", tuple(self.rankings))
        for r in self.rankings:
            if len(r.order) > self.m or any(a >= self.m for a in r.order):
                raise ValueError(
                    f"ranking of agent {r.agent} references alternatives "
                    f"outside 0..{self.m - 1}: {r.order}"
                )
        la, ly = self.latent_agents, self.latent_alternatives
        if la is not None:
            la = np.asarray(la, dtype=float)
            if la.ndim != 2 or la.shape[0] != len(self.rankings):
                raise ValueError("latent_agents must be an (n, d) array")
            object.__setattr__(self, "latent_agents", la)
        if ly is not None:
            ly = np.asarray(ly, dtype=float)
            if ly.ndim != 2 or ly.shape[0] != self.m:
                raise ValueError("latent_alternatives must be an (m, d) array")
            if la is not None and la.shape[1] != ly.shape[1]:
                raise ValueError("latent feature dimensions disagree")
            object.__setattr__(self, "latent_alternatives", ly)

    @property
    def n(self) -> int:
        return len(self.rankings)

    def orders(self) -> list[tuple[int, ...]]:
        return [r.order for r in self.rankings]

    def empty_agents(self) -> set[int]:
        """Agents with empty rankings; neighbor search should skip these."""
        return {i for i, r in enumerate(self.rankings) if r.is_empty}


@dataclass(frozen=True)
class TrustVector:
    """Per-agent trust scores, each in [0, 1]."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise ValueError("trust values must be a flat sequence")
        if not np.all(np.isfinite(v)) or np.any(v < 0.0) or np.any(v > 1.0):
            raise ValueError("trust values must all lie in [0, 1]")
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> float:
        return float(self.values[i])


def rank_position(r: Ranking, a: int) -> Optional[int]:
    """1-based position of alternative ``a`` in ``r``, or None if unranked."""
    try:
        return r.order.index(a) + 1
    except ValueError:
        return None


def common_alternatives(r1: Ranking, r2: Ranking) -> set[int]:
    """Alternatives present in both rankings."""
    return set(r1.order) & set(r2.order)
