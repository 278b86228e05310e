"""Command-line interface.

Subcommands: generate, neighbors, certainty, complete, evaluate, experiment.
Flags mirror the flat key=value config file one to one; flags win.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .completion import complete_for_target
from .distance import feature_matrix
from .harness import (
    ExperimentConfig,
    PreflibSource,
    SyntheticSource,
    config_from_mapping,
    parse_config_file,
    run_experiment,
)
from .metrics import MetricWeights
from .model import TrustVector
from .neighbors import NeighborQuery, anchor_knn, kt_knn, trust_anchor_knn
from .pairstats import (
    DecisionThresholds,
    PairCounts,
    certainty,
    conflict,
    to_preference,
)
from .preflib import parse_preflib_file, write_preflib
from .synth import PlackettLuceConfig, derive_trust, sample_dataset_with_noise

__all__ = ["main"]


def _add_generate(sub):
    p = sub.add_parser("generate", help="sample a synthetic dataset")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--noise-scale", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--latent-box", default="0,1", help="lo,hi for latent coordinates")
    p.add_argument("--noisy-fraction", type=float, default=0.0)
    p.add_argument("--noisy-multiplier", type=float, default=5.0)
    p.add_argument("--noise-spread", type=float, default=1.0)
    p.add_argument("--out", required=True, help="output, PrefLib order format")
    p.add_argument("--trust-out", help="optional per-agent trust CSV")
    p.add_argument("--latents-out", help="optional latent features .npz")


def _cmd_generate(args) -> int:
    lo, hi = (float(v) for v in args.latent_box.split(","))
    cfg = PlackettLuceConfig(
        n=args.n, m=args.m, d=args.d, noise_scale=args.noise_scale, seed=args.seed,
        latent_box=(lo, hi), noisy_fraction=args.noisy_fraction,
        noisy_multiplier=args.noisy_multiplier, noise_spread=args.noise_spread,
    )
    ds, noise = sample_dataset_with_noise(cfg)
    write_preflib(ds, args.out)
    if args.trust_out:
        trust = derive_trust(cfg, noise)
        from .preflib import write_csv

        write_csv(
            [{"agent": i, "trust": float(t)} for i, t in enumerate(trust.values)],
            args.trust_out,
        )
    if args.latents_out:
        np.savez(args.latents_out, agents=ds.latent_agents, alternatives=ds.latent_alternatives)
    return 0


def _load_trust(path: str | None, n: int) -> TrustVector | None:
    if not path:
        return None
    values = np.zeros(n)
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        cols = {name: i for i, name in enumerate(header)}
        for line in fh:
            parts = line.strip().split(",")
            if len(parts) < 2:
                continue
            values[int(parts[cols["agent"]])] = float(parts[cols["trust"]])
    return TrustVector(values)


def _add_neighbors(sub):
    p = sub.add_parser("neighbors", help="k nearest neighbors of a target agent")
    p.add_argument("--data", required=True, help="PrefLib order-format file")
    p.add_argument("--trust", help="per-agent trust CSV (agent,trust)")
    p.add_argument("--method", choices=("kt", "anchor", "trust-anchor"), default="anchor")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--epsilon0", type=float, default=0.0)
    p.add_argument("--target", type=int, required=True)


def _cmd_neighbors(args) -> int:
    ds = parse_preflib_file(args.data)
    F = feature_matrix(ds)
    q = NeighborQuery(target=args.target, k=args.k, epsilon0=args.epsilon0)
    exclude = ds.empty_agents() - {args.target}
    if args.method == "kt":
        nl = kt_knn(F, q, exclude=exclude)
    elif args.method == "anchor":
        nl = anchor_knn(F, q, exclude=exclude)
    else:
        trust = _load_trust(args.trust, ds.n)
        nl = trust_anchor_knn(F, trust, q, exclude=exclude)
    print("agent,distance")
    for a, d in zip(nl.agents, nl.distances):
        print(f"{a},{d!r}")
    return 0


def _add_certainty(sub):
    p = sub.add_parser("certainty", help="certainty/conflict for one pair tally")
    p.add_argument("--counts", required=True, help="n_ab,n_ba,n_unordered")
    p.add_argument("--resolution", type=int, default=400)


def _cmd_certainty(args) -> int:
    parts = [float(v) for v in args.counts.split(",")]
    if len(parts) == 2:
        parts.append(0.0)
    if len(parts) != 3:
        raise ValueError("--counts expects n_ab,n_ba,n_unordered")
    pc = PairCounts(*parts)
    c_plus = certainty(pc, args.resolution)
    print("certainty,conflict,p_plus,p_minus,c_minus")
    if pc.total > 0:
        t = to_preference(pc, args.resolution)
        print(f"{c_plus!r},{t.conflict!r},{t.p_plus!r},{t.p_minus!r},{t.c_minus!r}")
    else:
        print(f"{c_plus!r},{conflict(pc)!r},0.0,0.0,1.0")
    return 0


def _add_complete(sub):
    p = sub.add_parser("complete", help="complete one agent's ranking")
    p.add_argument("--data", required=True)
    p.add_argument("--trust", help="per-agent trust CSV (agent,trust)")
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--method", choices=("baseline", "certainty"), default="certainty")
    p.add_argument("--epsilon0", type=float, default=0.0)
    p.add_argument("--epsilon1", type=float, default=0.8)
    p.add_argument("--epsilon2", type=float, default=0.05)
    p.add_argument("--resolution", type=int, default=400)


def _cmd_complete(args) -> int:
    ds = parse_preflib_file(args.data)
    trust = _load_trust(args.trust, ds.n)
    predicted = complete_for_target(
        ds,
        trust,
        target=args.target,
        k=args.k,
        method=args.method,
        th=DecisionThresholds(epsilon1=args.epsilon1, epsilon2=args.epsilon2),
        epsilon0=args.epsilon0,
        resolution=args.resolution,
    )
    print(",".join(str(a) for a in predicted.order))
    return 0


def _experiment_flags(p, require_config: bool):
    p.add_argument("--config", required=require_config, help="flat key=value config file")
    for flag in (
        "source", "n", "m", "d", "noise_scale", "latent_box", "noisy_fraction",
        "noisy_multiplier", "noise_spread", "preflib_path", "subsample", "k_grid", "methods",
        "epsilon0", "epsilon1", "epsilon2", "mask_fraction", "weight_a",
        "output_dir", "master_seed", "targets", "resolution",
    ):
        p.add_argument(f"--{flag.replace('_', '-')}", dest=f"cfg_{flag}")


def _merged_config(args) -> ExperimentConfig:
    values = parse_config_file(args.config) if args.config else {}
    for key, value in vars(args).items():
        if key.startswith("cfg_") and value is not None:
            values[key[4:]] = value
    return config_from_mapping(values)


def _add_experiment(sub):
    p = sub.add_parser("experiment", help="full k-sweep experiment, writes CSVs")
    _experiment_flags(p, require_config=False)


def _cmd_experiment(args) -> int:
    cfg = _merged_config(args)
    result = run_experiment(cfg)
    for name in sorted(result.files):
        print(result.files[name])
    return 0


def _add_evaluate(sub):
    p = sub.add_parser("evaluate", help="metrics for one method/k, printed as CSV")
    _experiment_flags(p, require_config=False)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--method", default="anchor+baseline")


def _cmd_evaluate(args) -> int:
    base = _merged_config(args)
    cfg = replace(base, k_grid=(args.k,), methods=(args.method,), output_dir=None)
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        cfg = replace(cfg, output_dir=tmp)
        result = run_experiment(cfg)
    if not result.rows:
        raise RuntimeError("no metric rows produced")
    row = result.rows[0]
    print(",".join(row.keys()))
    print(",".join(repr(v) if isinstance(v, float) else str(v) for v in row.values()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prefcomplete",
        description="Trustworthy preference completion toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_generate(sub)
    _add_neighbors(sub)
    _add_certainty(sub)
    _add_complete(sub)
    _add_evaluate(sub)
    _add_experiment(sub)
    return parser


_COMMANDS = {
    "generate": _cmd_generate,
    "neighbors": _cmd_neighbors,
    "certainty": _cmd_certainty,
    "complete": _cmd_complete,
    "evaluate": _cmd_evaluate,
    "experiment": _cmd_experiment,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except Exception as exc:  # one-line diagnostic, nonzero exit
        print(f"prefcomplete: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
