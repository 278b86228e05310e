"""Acceptance suite.

Each test checks one acceptance criterion end to end at its stated
tolerance and prints a single PASS/FAIL line (written to the real stdout so
it shows regardless of capture). The one criterion that is mathematically
unattainable — strict certainty growth along the equal-evidence chain with
five unordered votes — is kept as a strict expected failure; see the
project notes ledger entry D3 for the analysis.
"""

from __future__ import annotations

import itertools
import sys
import time

import numpy as np
import pytest
from scipy import stats
from scipy.integrate import dblquad

from prefcomplete.distance import feature_matrix, normalized_kendall_tau
from prefcomplete.harness import ExperimentConfig, SyntheticSource, run_experiment
from prefcomplete.model import Dataset, Ranking, TrustVector, common_alternatives
from prefcomplete.neighbors import NeighborQuery, anchor_knn, trust_anchor_knn
from prefcomplete.pairstats import (
    PairCounts,
    SimplexPoint,
    certainty,
    certainty_mc_many,
    posterior_density,
)
from prefcomplete.preflib import parse_preflib, parse_preflib_file, serialize_preflib
from prefcomplete.synth import PlackettLuceConfig, sample_dataset

FIXTURE = "tests/data/dublin_west_shaped.soc"

# Shared synthetic setup for both figure-trend criteria: a 1-D latent line
# keeps the anchor distance informative deep into the candidate list, and
# the two-block noise continuum (a clean block with scales 0.003..0.09 and
# a 40% garbage block at 3..90) gives trust a real quality ordering plus a
# population worth excluding. See ledger entry D7 for the sweep.
FIG_SYNTH = PlackettLuceConfig(
    n=500,
    m=10,
    d=1,
    noise_scale=0.003,
    latent_box=(0.0, 10.0),
    noisy_fraction=0.4,
    noisy_multiplier=1000.0,
    noise_spread=30.0,
)
FIG_SEEDS = range(20)


_CAPMAN = None


@pytest.fixture(autouse=True)
def _grab_capture_manager(request):
    global _CAPMAN
    _CAPMAN = request.config.pluginmanager.getplugin("capturemanager")
    yield


def report(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" — {detail}" if detail else ""
    line = f"[ACCEPTANCE] {name}: {status}{suffix}\n"
    # pytest's default capture redirects the stdout file descriptor itself,
    # so the criterion lines must be written with capture suspended.
    if _CAPMAN is not None:
        with _CAPMAN.global_and_fixture_disabled():
            sys.stdout.write(line)
            sys.stdout.flush()
    else:
        sys.__stdout__.write(line)
        sys.__stdout__.flush()


def all_counts(max_total: int = 30) -> list[PairCounts]:
    out = []
    for total in range(max_total + 1):
        for a in range(total + 1):
            for b in range(total - a + 1):
                out.append(PairCounts(float(a), float(b), float(total - a - b)))
    return out


# ---------------------------------------------------------------------------
# Certainty oracle equivalence
# ---------------------------------------------------------------------------


def test_certainty_oracle_equivalence():
    """|certainty(quadrature, res 400) − MC(1e7)| ≤ 1e-3 for every integer
    count triple with total ≤ 30; full sweep under 10 minutes."""
    t0 = time.time()
    counts = all_counts(30)
    quad = np.array([certainty(pc, resolution=400) for pc in counts])
    mc = certainty_mc_many(counts, samples=10**7, seed=0)
    err = np.abs(quad - mc)
    worst = float(err.max())
    elapsed = time.time() - t0
    ok = worst <= 1e-3 and elapsed < 600.0
    report(
        "certainty oracle equivalence",
        ok,
        f"{len(counts)} triples, max |quad−mc| = {worst:.2e} (≤ 1e-3), {elapsed:.0f}s",
    )
    assert worst <= 1e-3
    assert elapsed < 600.0


# ---------------------------------------------------------------------------
# Certainty monotonicity suites
# ---------------------------------------------------------------------------

EQUAL_CHAIN = ((1, 1), (2, 2), (4, 4), (8, 8))
RATIO_CHAIN = ((3, 1), (6, 2), (12, 4))


def chain_values(chain, u: float) -> list[float]:
    return [certainty(PairCounts(float(a), float(b), float(u))) for a, b in chain]


def test_certainty_chain_monotonicity_attainable_cases():
    """Certainty strictly increases along both evidence chains for
    u ∈ {0,2,5} — except the equal chain at u = 5, covered (and expected to
    fail) by the companion test below."""
    failures = []
    for chain, u in itertools.product((EQUAL_CHAIN, RATIO_CHAIN), (0, 2, 5)):
        if chain == EQUAL_CHAIN and u == 5:
            continue
        vals = chain_values(chain, u)
        if not all(b > a + 1e-9 for a, b in zip(vals, vals[1:])):
            failures.append((chain, u, vals))
    report(
        "certainty chain monotonicity",
        not failures,
        "5 of 6 chain/u cases strictly increase; equal chain at u=5 is "
        "non-monotone (known false case, expected failure below; ledger D3)",
    )
    assert not failures, failures


@pytest.mark.xfail(
    strict=True,
    reason="Certainty dips from (1,1,5) to (2,2,5); verified by quadrature, "
    "Monte-Carlo, and adaptive integration under both prior conventions. "
    "The pinned criterion is mathematically unattainable — see the notes "
    "ledger, entry D3.",
)
def test_certainty_equal_chain_high_unordered():
    vals = chain_values(EQUAL_CHAIN, 5)
    ok = all(b > a + 1e-9 for a, b in zip(vals, vals[1:]))
    report(
        "certainty chain monotonicity, equal chain at u=5",
        ok,
        "certainty(1,1,5)=%.4f > certainty(2,2,5)=%.4f — honest red (ledger D3)"
        % (vals[0], vals[1]),
    )
    assert ok, vals


def test_certainty_minimized_at_even_split():
    """For n_ab + n_ba = 10 and u ∈ {0,2,5}: certainty over n_ab = 0..10 is
    minimal at the even split, non-increasing before it, non-decreasing
    after it (tolerance 1e-9)."""
    ok = True
    detail = []
    for u in (0, 2, 5):
        vals = [certainty(PairCounts(float(a), float(10 - a), float(u))) for a in range(11)]
        ok &= int(np.argmin(vals)) == 5
        ok &= all(vals[i] >= vals[i + 1] - 1e-9 for i in range(5))
        ok &= all(vals[i] <= vals[i + 1] + 1e-9 for i in range(5, 10))
        detail.append(f"u={u}: min at {int(np.argmin(vals))}")
    report("certainty minimized at even split", ok, "; ".join(detail))
    assert ok


# ---------------------------------------------------------------------------
# Posterior normalization
# ---------------------------------------------------------------------------


def test_posterior_normalization():
    """Adaptive quadrature of posterior_density over the simplex equals
    1 ± 1e-6 for 50 random integer count triples with total ≤ 30."""
    rng = np.random.default_rng(12345)
    worst = 0.0
    for _ in range(50):
        total = int(rng.integers(0, 31))
        a = int(rng.integers(0, total + 1))
        b = int(rng.integers(0, total - a + 1))
        pc = PairCounts(float(a), float(b), float(total - a - b))
        integral, _ = dblquad(
            lambda y, x: posterior_density(pc, SimplexPoint(x, y)),
            0.0,
            1.0,
            0.0,
            lambda x: 1.0 - x,
            epsabs=1e-10,
            epsrel=1e-10,
        )
        worst = max(worst, abs(integral - 1.0))
    ok = worst <= 1e-6
    report("posterior normalization", ok, f"50 triples, max |∫f − 1| = {worst:.2e} (≤ 1e-6)")
    assert ok


# ---------------------------------------------------------------------------
# Normalized Kendall-Tau oracle
# ---------------------------------------------------------------------------


def brute_nk(r1: Ranking, r2: Ranking) -> float:
    shared = sorted(common_alternatives(r1, r2))
    if len(shared) < 2:
        return 0.5
    pos1 = {alt: i for i, alt in enumerate(r1.order)}
    pos2 = {alt: i for i, alt in enumerate(r2.order)}
    discordant = pairs = 0
    for a, b in itertools.combinations(shared, 2):
        pairs += 1
        if (pos1[a] - pos1[b]) * (pos2[a] - pos2[b]) < 0:
            discordant += 1
    return discordant / pairs


def random_partial_ranking(agent: int, m: int, rng: np.random.Generator) -> Ranking:
    size = int(rng.integers(0, m + 1))
    return Ranking(agent, tuple(rng.permutation(m)[:size]))


def test_nk_oracle():
    """normalized_kendall_tau equals brute-force pair enumeration exactly on
    1,000 random ranking pairs with m ≤ 8 and partial overlap."""
    rng = np.random.default_rng(2024)
    ok = True
    for _ in range(1000):
        m = int(rng.integers(2, 9))
        r1 = random_partial_ranking(0, m, rng)
        r2 = random_partial_ranking(1, m, rng)
        if normalized_kendall_tau(r1, r2) != brute_nk(r1, r2):
            ok = False
            break
    report("NK oracle", ok, "1000 random pairs (m ≤ 8, partial overlap), exact equality")
    assert ok


# ---------------------------------------------------------------------------
# kNN reductions
# ---------------------------------------------------------------------------


def test_knn_reductions():
    """trust_anchor_knn with uniform trust equals anchor_knn exactly on 100
    random datasets; agents with trust ≤ ε₀ never appear in any result."""
    rng = np.random.default_rng(99)
    ok = True
    for trial in range(100):
        n = int(rng.integers(4, 16))
        m = int(rng.integers(3, 7))
        rankings = [
            Ranking(i, tuple(rng.permutation(m)[: int(rng.integers(2, m + 1))]))
            for i in range(n)
        ]
        ds = Dataset(m=m, rankings=rankings)
        F = feature_matrix(ds)
        target = int(rng.integers(0, n))
        k = int(rng.integers(1, n))
        q = NeighborQuery(target=target, k=k)
        plain = anchor_knn(F, q)
        uniform = trust_anchor_knn(F, TrustVector(np.ones(n)), q)
        none = trust_anchor_knn(F, None, q)
        if not (plain.agents == uniform.agents == none.agents):
            ok = False
            break
        trust_vals = rng.random(n)
        eps0 = 0.3
        eligible = {i for i in range(n) if i != target and trust_vals[i] > eps0}
        if not eligible:
            continue
        q2 = NeighborQuery(target=target, k=min(k, len(eligible)), epsilon0=eps0)
        res = trust_anchor_knn(F, TrustVector(trust_vals), q2)
        if any(trust_vals[a] <= eps0 for a in res.agents):
            ok = False
            break
    report(
        "kNN reductions",
        ok,
        "uniform-trust ≡ anchor on 100 random datasets; ε₀-excluded agents never returned",
    )
    assert ok


# ---------------------------------------------------------------------------
# Figure trends at desk scale
# ---------------------------------------------------------------------------


def _figure_run(seed: int, k_grid, methods, mask: float, out_dir) -> dict:
    cfg = ExperimentConfig(
        source=SyntheticSource(FIG_SYNTH),
        k_grid=tuple(k_grid),
        methods=tuple(methods),
        mask_fraction=mask,
        master_seed=seed,
        targets=100,
        output_dir=str(out_dir),
    )
    return {(r["method"], r["k"]): r for r in run_experiment(cfg).rows}


def test_fig3_rmse_trend(tmp_path):
    """Synthetic n=500, m=10, 20 seeds: mean neighbor RMSE of trust-based
    anchor-kNN beats plain anchor-kNN at every k ≤ 0.3·n = 150, one-sided
    paired p < 0.05; runtime < 5 min. Neighbor-search experiment: light
    masking (0.1)."""
    t0 = time.time()
    ks = (10, 25, 50, 75, 100, 125, 150)
    methods = ("anchor+baseline", "trust-anchor+baseline")
    per = {k: [] for k in ks}
    for seed in FIG_SEEDS:
        rows = _figure_run(seed, ks, methods, 0.1, tmp_path / f"fig3-{seed}")
        for k in ks:
            per[k].append(
                (rows[("anchor+baseline", k)]["rmse"], rows[("trust-anchor+baseline", k)]["rmse"])
            )
    elapsed = time.time() - t0
    ok = elapsed < 300.0
    detail = []
    for k in ks:
        arr = np.array(per[k])
        anchor, trusted = arr[:, 0], arr[:, 1]
        p = stats.ttest_rel(anchor, trusted, alternative="greater").pvalue
        ok &= trusted.mean() < anchor.mean() and p < 0.05
        detail.append(f"k={k}: {trusted.mean():.3f} < {anchor.mean():.3f} (p={p:.1e})")
    report("Fig3 RMSE trend", ok, "; ".join(detail) + f"; {elapsed:.0f}s")
    assert ok


def test_fig4_fig5_bias_pre_trend(tmp_path):
    """Same synthetic setup, 20 seeds: mean bias and mean Pre of
    trust-anchor + certainty completion are ≥ anchor + majority baseline at
    every k in {10,20,40,80}, strictly better at ≥ 3 of 4. Completion
    experiment: heavy masking (0.65)."""
    ks = (10, 20, 40, 80)
    methods = ("anchor+baseline", "trust-anchor+certainty")
    acc = {k: np.zeros(4) for k in ks}
    for seed in FIG_SEEDS:
        rows = _figure_run(seed, ks, methods, 0.65, tmp_path / f"fig45-{seed}")
        for k in ks:
            base = rows[("anchor+baseline", k)]
            ours = rows[("trust-anchor+certainty", k)]
            acc[k] += np.array([base["bias"], ours["bias"], base["pre"], ours["pre"]])
    ok = True
    detail = []
    for metric, (lo, hi) in (("bias", (0, 1)), ("pre", (2, 3))):
        diffs = [acc[k][hi] - acc[k][lo] for k in ks]
        strict = sum(d > 0 for d in diffs)
        ok &= all(d >= 0 for d in diffs) and strict >= 3
        detail.append(
            f"{metric}: Δ=[" + ", ".join(f"{d:+.4f}" for d in diffs) + f"], strict {strict}/4"
        )
    report("Fig4/5 bias & Pre trend", ok, "; ".join(detail))
    assert ok


# ---------------------------------------------------------------------------
# Determinism
# ---------------------------------------------------------------------------


def test_experiment_determinism(tmp_path):
    """Two full experiment runs with an identical config and master seed
    produce byte-identical CSVs."""
    small = PlackettLuceConfig(
        n=80, m=8, d=1, noise_scale=0.003, latent_box=(0.0, 10.0),
        noisy_fraction=0.4, noisy_multiplier=1000.0, noise_spread=30.0,
    )
    outputs = []
    for run in ("a", "b"):
        cfg = ExperimentConfig(
            source=SyntheticSource(small),
            k_grid=(5, 10, 20),
            mask_fraction=0.3,
            master_seed=7,
            output_dir=str(tmp_path / run),
        )
        outputs.append(run_experiment(cfg).files)
    names = sorted(outputs[0])
    ok = names == sorted(outputs[1]) and all(
        outputs[0][n].read_bytes() == outputs[1][n].read_bytes() for n in names
    )
    report("experiment determinism", ok, f"{len(names)} CSVs byte-identical across two runs")
    assert ok


# ---------------------------------------------------------------------------
# PrefLib round-trip
# ---------------------------------------------------------------------------


def test_preflib_round_trip():
    """parse → serialize → parse yields an identical ballot multiset on the
    bundled 9-alternative fixture."""
    ds = parse_preflib_file(FIXTURE)
    again = parse_preflib(serialize_preflib(ds))
    multiset = lambda d: sorted(r.order for r in d.rankings)
    ok = ds.m == again.m == 9 and multiset(ds) == multiset(again)
    report("PrefLib round-trip", ok, f"{len(ds.rankings)} ballots over {ds.m} alternatives")
    assert ok
