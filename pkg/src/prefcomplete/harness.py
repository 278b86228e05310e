"""End-to-end experiment orchestration.

Generates or loads a dataset, masks part of every agent's ranking, runs the
configured (neighbor-search x completion) method combinations over a k-sweep,
evaluates against the unmasked truth, and writes fixed-name CSVs consumed by
the plotting tool. Every output is a pure function of (config, master_seed).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .completion import _certainty_memo, complete_ranking
from .distance import feature_matrix, pair_sign_matrix
from .metrics import MetricWeights, bias, pre_score, precision_at_5, rmse
from .model import Dataset, Ranking, TrustVector
from .neighbors import NeighborList, NeighborQuery, NoCandidatesError, trust_anchor_knn
from .pairstats import DecisionThresholds, PairCounts, PreferenceTriple, conflict
from .preflib import parse_preflib_file, subsample, write_csv
from .synth import PlackettLuceConfig, derive_trust, sample_dataset_with_noise

__all__ = [
    "SyntheticSource",
    "PreflibSource",
    "ExperimentConfig",
    "ExperimentResult",
    "KNN_METHODS",
    "mask_rankings",
    "run_experiment",
    "parse_config_file",
    "config_from_mapping",
]

KNN_METHODS = ("anchor", "trust-anchor")

OUTPUT_DIR_ENV = "PREFCOMPLETE_OUTPUT_DIR"

FIGURE_FILES = {
    "synthetic": {"rmse": "fig3_rmse.csv", "bias": "fig4_bias.csv", "pre": "fig5_pre.csv"},
    "preflib": {"bias": "fig6_bias_real.csv", "pre": "fig7_pre_real.csv"},
}


@dataclass(frozen=True)
class SyntheticSource:
    config: PlackettLuceConfig


@dataclass(frozen=True)
class PreflibSource:
    path: str
    subsample_count: Optional[int] = None


DataSource = Union[SyntheticSource, PreflibSource]


@dataclass(frozen=True)
class ExperimentConfig:
    source: DataSource
    k_grid: tuple[int, ...] = tuple(range(10, 401, 10))
    methods: tuple[str, ...] = (
        "anchor+baseline",
        "anchor+certainty",
        "trust-anchor+baseline",
        "trust-anchor+certainty",
    )
    thresholds: DecisionThresholds = DecisionThresholds()
    epsilon0: float = 0.0
    mask_fraction: float = 0.3
    metric_weights: MetricWeights = MetricWeights()
    output_dir: Optional[str] = None
    master_seed: int = 0
    targets: Optional[int] = None  # evaluate only the first N agents
    resolution: int = 400

    def __post_init__(self):
        if not self.methods:
            raise ValueError("at least one method combination is required")
        for method in self.methods:
            knn, _, comp = method.partition("+")
            if knn not in KNN_METHODS or comp not in ("baseline", "certainty"):
                raise ValueError(f"unknown method combination {method!r}")
        if not self.k_grid or any(k < 1 for k in self.k_grid):
            raise ValueError("k_grid must hold positive integers")
        if list(self.k_grid) != sorted(self.k_grid):
            raise ValueError("k_grid must be ascending")
        if not 0.0 <= self.mask_fraction < 1.0:
            raise ValueError("mask_fraction must lie in [0, 1)")

    def resolved_output_dir(self) -> Path:
        if self.output_dir is not None:
            return Path(self.output_dir)
        return Path(os.environ.get(OUTPUT_DIR_ENV, "results"))


@dataclass
class ExperimentResult:
    rows: list[dict]
    files: dict[str, Path] = field(default_factory=dict)


def mask_rankings(ds: Dataset, fraction: float, seed: int) -> tuple[Dataset, tuple[Ranking, ...]]:
    """Remove a seeded random subset of ceil(fraction * len) alternatives
    from each agent's ranking, preserving survivor order. Returns the masked
    dataset and the held-out sub-rankings."""
    if not 0.0 <= fraction < 1.0:
        raise ValueError("mask fraction must lie in [0, 1)")
    ss = np.random.SeedSequence(seed)
    seeds = ss.spawn(ds.n)
    masked = []
    held = []
    for i, r in enumerate(ds.rankings):
        n_remove = math.ceil(fraction * len(r.order))
        rng = np.random.default_rng(seeds[i])
        removed = set(rng.choice(len(r.order), size=n_remove, replace=False).tolist()) if n_remove else set()
        keep = tuple(a for p, a in enumerate(r.order) if p not in removed)
        drop = tuple(a for p, a in enumerate(r.order) if p in removed)
        masked.append(Ranking(agent=r.agent, order=keep))
        held.append(Ranking(agent=r.agent, order=drop))
    masked_ds = Dataset(
        m=ds.m,
        rankings=tuple(masked),
        latent_agents=ds.latent_agents,
        latent_alternatives=ds.latent_alternatives,
    )
    return masked_ds, tuple(held)


def _load(cfg: ExperimentConfig) -> tuple[Dataset, Optional[TrustVector]]:
    gen_seed, sub_seed = (
        int(s) for s in np.random.SeedSequence(cfg.master_seed).generate_state(2)
    )
    if isinstance(cfg.source, SyntheticSource):
        pl_cfg = replace(cfg.source.config, seed=gen_seed)
        ds, noise = sample_dataset_with_noise(pl_cfg)
        return ds, derive_trust(pl_cfg, noise)
    ds = parse_preflib_file(cfg.source.path)
    if cfg.source.subsample_count is not None:
        ds = subsample(ds, cfg.source.subsample_count, sub_seed)
    return ds, None


def _pair_index(m: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(m, k=1)


def true_preference_matrix(
    rankings: Sequence[Ranking], m: int, resolution: int
) -> np.ndarray:
    """Oriented p_plus matrix from a ranking population (reference truth for
    the bias metric)."""
    signs = _signs_of(rankings, m)
    pres = _presence_of(rankings, m)
    n_ab, n_ba, n_un = _pair_tallies(signs, pres, m)
    ia, ib = _pair_index(m)
    p_plus = np.zeros((m, m), dtype=float)
    for p in range(len(ia)):
        pc = PairCounts(float(n_ab[p]), float(n_ba[p]), float(n_un[p]))
        if pc.total == 0.0:
            continue
        c_plus = _certainty_memo(pc, resolution)
        p_plus[ia[p], ib[p]] = pc.n_ab / pc.total * c_plus
        p_plus[ib[p], ia[p]] = pc.n_ba / pc.total * c_plus
    return p_plus


def _signs_of(rankings: Sequence[Ranking], m: int) -> np.ndarray:
    ds = Dataset(m=m, rankings=tuple(rankings))
    return pair_sign_matrix(ds)


def _presence_of(rankings: Sequence[Ranking], m: int) -> np.ndarray:
    pres = np.zeros((len(rankings), m), dtype=bool)
    for i, r in enumerate(rankings):
        pres[i, list(r.order)] = True
    return pres


def _pair_tallies(signs: np.ndarray, pres: np.ndarray, m: int):
    """Vectorized unit-weight pair counts over a set of rankings."""
    ia, ib = _pair_index(m)
    n_ab = (signs == 1).sum(axis=0)
    n_ba = (signs == -1).sum(axis=0)
    n_un = (pres[:, ia] ^ pres[:, ib]).sum(axis=0)
    return n_ab, n_ba, n_un


def _complete_fast(
    signs_sub: np.ndarray,
    pres_sub: np.ndarray,
    m: int,
    method: str,
    th: DecisionThresholds,
    resolution: int,
    agent: int,
) -> Ranking:
    """Completion from the neighbors' sign/presence rows; equivalent to the
    vote-matrix path in :mod:`prefcomplete.completion` but vectorized."""
    ia, ib = _pair_index(m)
    n_ab, n_ba, n_un = _pair_tallies(signs_sub, pres_sub, m)
    votes = (n_ab - n_ba).astype(float)
    scores = np.zeros(m, dtype=float)
    if method == "baseline":
        np.add.at(scores, ia, votes)
        np.add.at(scores, ib, -votes)
        return complete_ranking(scores, agent=agent)
    for p in range(len(ia)):
        total = float(n_ab[p] + n_ba[p] + n_un[p])
        if total == 0.0:
            continue
        pc = PairCounts(float(n_ab[p]), float(n_ba[p]), float(n_un[p]))
        c_plus = _certainty_memo(pc, resolution)
        p_plus = pc.n_ab / total * c_plus
        p_minus = pc.n_ba / total * c_plus
        c_minus = 1.0 - c_plus
        if c_minus < th.epsilon1 and abs(p_plus - p_minus) >= th.epsilon2:
            scores[ia[p]] += votes[p] * p_plus
            scores[ib[p]] += -votes[p] * p_minus
    return complete_ranking(scores, agent=agent)


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run the full sweep and write the figure CSVs plus combined.csv."""
    ds, trust = _load(cfg)
    if max(cfg.k_grid) > ds.n - 1:
        raise ValueError(f"k_grid exceeds candidate count {ds.n - 1}")
    mask_seed = int(np.random.SeedSequence((cfg.master_seed, 1)).generate_state(1)[0])
    masked, _held = mask_rankings(ds, cfg.mask_fraction, mask_seed)
    F = feature_matrix(masked)
    signs = pair_sign_matrix(masked)
    pres = _presence_of(masked.rankings, masked.m)
    p_plus_true = true_preference_matrix(ds.rankings, ds.m, cfg.resolution)
    synthetic = isinstance(cfg.source, SyntheticSource)

    n_targets = ds.n if cfg.targets is None else min(cfg.targets, ds.n)
    knn_methods = sorted({m.partition("+")[0] for m in cfg.methods})
    empty = masked.empty_agents()

    # method -> k -> list of per-target metric dicts
    sums: dict[str, dict[int, dict[str, float]]] = {
        m: {k: {"rmse": 0.0, "bias": 0.0, "precision5": 0.0, "pre": 0.0, "n": 0} for k in cfg.k_grid}
        for m in cfg.methods
    }

    for target in range(n_targets):
        full_lists: dict[str, NeighborList] = {}
        for knn in knn_methods:
            t = trust if knn == "trust-anchor" else None
            eps0 = cfg.epsilon0 if knn == "trust-anchor" else 0.0
            q = NeighborQuery(target=target, k=ds.n - 1, epsilon0=eps0)
            try:
                full_lists[knn] = trust_anchor_knn(F, t, q, exclude=empty - {target})
            except NoCandidatesError:
                raise NoCandidatesError(
                    f"target {target}: every candidate excluded (epsilon0={eps0})"
                )
        truth = ds.rankings[target]
        for method in cfg.methods:
            knn, _, comp = method.partition("+")
            ranked = full_lists[knn]
            for k in cfg.k_grid:
                agents = ranked.agents[:k]
                if not agents:
                    continue
                sub = list(agents)
                predicted = _complete_fast(
                    signs[sub], pres[sub], ds.m, comp, cfg.thresholds, cfg.resolution, target
                )
                row = sums[method][k]
                if synthetic:
                    nl = NeighborList(agents=agents, distances=ranked.distances[:k])
                    row["rmse"] += rmse(nl, ds, target)
                b = bias(predicted, p_plus_true)
                p5 = precision_at_5(predicted, truth) if len(truth.order) else 1.0
                row["bias"] += b
                row["precision5"] += p5
                row["pre"] += cfg.metric_weights.weight_a * p5 + cfg.metric_weights.weight_b * b
                row["n"] += 1

    rows = []
    for method in cfg.methods:
        for k in cfg.k_grid:
            acc = sums[method][k]
            cnt = acc["n"]
            if cnt == 0:
                continue
            row = {"method": method, "k": k}
            if synthetic:
                row["rmse"] = acc["rmse"] / cnt
            row.update(
                bias=acc["bias"] / cnt,
                precision5=acc["precision5"] / cnt,
                pre=acc["pre"] / cnt,
            )
            rows.append(row)

    out_dir = cfg.resolved_output_dir()
    out_dir.mkdir(parents=True, exist_ok=True)
    files: dict[str, Path] = {}

    combined = out_dir / "combined.csv"
    write_csv(rows, combined)
    files["combined"] = combined

    figure_map = FIGURE_FILES["synthetic" if synthetic else "preflib"]
    for metric, filename in figure_map.items():
        path = out_dir / filename
        if metric == "rmse":
            # RMSE depends only on the neighbor-search variant; one row per knn method.
            seen = set()
            fig_rows = []
            for row in rows:
                knn = row["method"].partition("+")[0]
                if (knn, row["k"]) in seen:
                    continue
                seen.add((knn, row["k"]))
                fig_rows.append({"method": knn, "k": row["k"], "rmse": row["rmse"]})
            write_csv(fig_rows, path, columns=["method", "k", "rmse"])
        else:
            fig_rows = [
                {"method": row["method"], "k": row["k"], metric: row[metric]} for row in rows
            ]
            write_csv(fig_rows, path, columns=["method", "k", metric])
        files[filename] = path

    return ExperimentResult(rows=rows, files=files)


# ---------------------------------------------------------------------------
# Flat key=value config files
# ---------------------------------------------------------------------------

_CONFIG_KEYS = {
    "source", "n", "m", "d", "noise_scale", "latent_box", "noisy_fraction",
    "noisy_multiplier", "noise_spread", "preflib_path", "subsample", "k_grid", "methods",
    "epsilon0", "epsilon1", "epsilon2", "mask_fraction", "weight_a",
    "output_dir", "master_seed", "targets", "resolution",
}


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Flat key=value config text; '#' starts a comment line."""
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{line_no}: expected 'key = value', got {raw!r}")
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{line_no}: unknown config key {key!r}")
            values[key] = value.strip()
    return values


def config_from_mapping(values: dict[str, str]) -> ExperimentConfig:
    """Build an ExperimentConfig from string key=value pairs (config file
    entries, possibly overridden by CLI flags)."""
    def get(key, default=None):
        return values.get(key, default)

    source_kind = get("source", "synthetic")
    if source_kind == "synthetic":
        box = get("latent_box", "0,1").split(",")
        source: DataSource = SyntheticSource(
            PlackettLuceConfig(
                n=int(get("n", "100")),
                m=int(get("m", "10")),
                d=int(get("d", "2")),
                noise_scale=float(get("noise_scale", "1.0")),
                latent_box=(float(box[0]), float(box[1])),
                noisy_fraction=float(get("noisy_fraction", "0.0")),
                noisy_multiplier=float(get("noisy_multiplier", "5.0")),
                noise_spread=float(get("noise_spread", "1.0")),
            )
        )
    elif source_kind == "preflib":
        path = get("preflib_path")
        if not path:
            raise ValueError("preflib source needs preflib_path")
        sub = get("subsample")
        source = PreflibSource(path=path, subsample_count=int(sub) if sub else None)
    else:
        raise ValueError(f"unknown data source {source_kind!r}")

    weight_a = float(get("weight_a", "0.5"))
    targets = get("targets")
    return ExperimentConfig(
        source=source,
        k_grid=tuple(int(k) for k in get("k_grid", "10,20,40,80").split(",")),
        methods=tuple(s.strip() for s in get(
            "methods",
            "anchor+baseline,anchor+certainty,trust-anchor+baseline,trust-anchor+certainty",
        ).split(",")),
        thresholds=DecisionThresholds(
            epsilon1=float(get("epsilon1", "0.8")),
            epsilon2=float(get("epsilon2", "0.05")),
        ),
        epsilon0=float(get("epsilon0", "0.0")),
        mask_fraction=float(get("mask_fraction", "0.3")),
        metric_weights=MetricWeights(weight_a=weight_a, weight_b=1.0 - weight_a),
        output_dir=get("output_dir"),
        master_seed=int(get("master_seed", "0")),
        targets=int(targets) if targets not in (None, "", "all") else None,
        resolution=int(get("resolution", "400")),
    )
