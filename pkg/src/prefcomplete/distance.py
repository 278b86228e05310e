"""Normalized Kendall-Tau distance and the all-pairs feature matrix.

The feature matrix is the O(n^2 m^2) kernel of the whole pipeline; it is
computed once per dataset from integer discordance counts (so results are
bit-identical regardless of evaluation order) and can be cached on disk.
"""

from __future__ import annotations

import hashlib
import os
import struct
from pathlib import Path
from typing import Optional

import numpy as np

from .model import Dataset, Ranking, common_alternatives

__all__ = [
    "normalized_kendall_tau",
    "feature_matrix",
    "pair_sign_matrix",
    "save_feature_matrix",
    "load_feature_matrix",
    "cached_feature_matrix",
    "dataset_digest",
]

# Intersection of fewer than 2 alternatives carries no pairwise information;
# 0.5 keeps sparse data usable in anchor averages.
NEUTRAL_DISTANCE = 0.5

_CACHE_MAGIC = b"NKFMAT01"


def normalized_kendall_tau(r1: Ranking, r2: Ranking) -> float:
    """Fraction of discordant pairs over the common alternatives of r1, r2."""
    common = common_alternatives(r1, r2)
    s = len(common)
    if s < 2:
        return NEUTRAL_DISTANCE
    pos1 = {a: i for i, a in enumerate(r1.order)}
    pos2 = {a: i for i, a in enumerate(r2.order)}
    items = sorted(common)
    discordant = 0
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            a, b = items[i], items[j]
            if (pos1[a] - pos1[b]) * (pos2[a] - pos2[b]) < 0:
                discordant += 1
    return discordant / (s * (s - 1) // 2)


def pair_sign_matrix(ds: Dataset) -> np.ndarray:
    """Per-agent pairwise order signs, shape (n, m*(m-1)/2), dtype int8.

    Column p encodes the unordered pair (a, b) with a < b, enumerated in
    lexicographic order: +1 if the agent ranks a before b, -1 if b before a,
    0 if either alternative is unranked.
    """
    m = ds.m
    n = ds.n
    pos = np.full((n, m), -1, dtype=np.int32)
    for i, r in enumerate(ds.rankings):
        for p, a in enumerate(r.order):
            pos[i, a] = p
    ia, ib = np.triu_indices(m, k=1)
    pa = pos[:, ia]
    pb = pos[:, ib]
    signs = np.sign(pb - pa).astype(np.int8)
    signs[(pa < 0) | (pb < 0)] = 0
    return signs


def feature_matrix(ds: Dataset) -> np.ndarray:
    """Symmetric (n, n) matrix of normalized Kendall-Tau distances."""
    if ds.n < 2:
        raise ValueError("feature matrix needs at least 2 rankings")
    signs = pair_sign_matrix(ds)
    fwd = (signs == 1).astype(np.float32)
    bwd = (signs == -1).astype(np.float32)
    present = fwd + bwd
    # Integer counts, exactly representable in float32 for m*(m-1)/2 < 2^24.
    discordant = fwd @ bwd.T + bwd @ fwd.T
    valid = present @ present.T
    F = np.full((ds.n, ds.n), NEUTRAL_DISTANCE, dtype=np.float64)
    ok = valid >= 1.0
    F[ok] = discordant[ok].astype(np.float64) / valid[ok].astype(np.float64)
    np.fill_diagonal(F, 0.0)
    return F


def dataset_digest(ds: Dataset) -> str:
    """Content hash of a dataset's rankings, for keying the disk cache."""
    h = hashlib.sha256()
    h.update(str(ds.m).encode())
    for r in ds.rankings:
        h.update(b"|")
        h.update(",".join(map(str, r.order)).encode())
    return h.hexdigest()


def save_feature_matrix(F: np.ndarray, path: str | Path) -> None:
    F = np.ascontiguousarray(F, dtype="<f8")
    n = F.shape[0]
    if F.shape != (n, n):
        raise ValueError("feature matrix must be square")
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<Q", n))
        fh.write(F.tobytes())


def load_feature_matrix(path: str | Path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != _CACHE_MAGIC:
            raise ValueError(f"{path}: not a feature-matrix cache file")
        (n,) = struct.unpack("<Q", fh.read(8))
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != n * n:
        raise ValueError(f"{path}: truncated feature-matrix cache")
    return data.reshape(n, n).copy()


def cached_feature_matrix(ds: Dataset, cache_dir: Optional[str | Path] = None) -> np.ndarray:
    """feature_matrix with an optional on-disk cache keyed by dataset hash."""
    if cache_dir is None:
        return feature_matrix(ds)
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    path = cache_dir / f"{dataset_digest(ds)}.nkf"
    if path.exists():
        return load_feature_matrix(path)
    F = feature_matrix(ds)
    tmp = path.with_suffix(".tmp")
    save_feature_matrix(F, tmp)
    os.replace(tmp, path)
    return F
