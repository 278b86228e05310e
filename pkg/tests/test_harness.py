import math
from pathlib import Path

import numpy as np
import pytest

from prefcomplete.completion import complete_for_target
from prefcomplete.harness import (
    ExperimentConfig,
    PreflibSource,
    SyntheticSource,
    _complete_fast,
    _presence_of,
    config_from_mapping,
    mask_rankings,
    parse_config_file,
    run_experiment,
    true_preference_matrix,
)
from prefcomplete.model import Dataset, Ranking
from prefcomplete.pairstats import DecisionThresholds, PairCounts, certainty
from prefcomplete.distance import pair_sign_matrix
from prefcomplete.synth import PlackettLuceConfig

FIXTURE = str(Path(__file__).parent / "data" / "dublin_west_shaped.soc")


def small_synth_config(**overrides):
    base = dict(
        source=SyntheticSource(PlackettLuceConfig(n=30, m=5, noise_scale=0.5)),
        k_grid=(3, 6),
        mask_fraction=0.3,
        master_seed=7,
        resolution=120,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


# --- masking -------------------------------------------------------------------


def test_mask_rankings_counts_and_order():
    ds = Dataset(m=6, rankings=[Ranking(i, (0, 1, 2, 3, 4, 5)) for i in range(4)])
    masked, held = mask_rankings(ds, 0.3, seed=1)
    for r, h in zip(masked.rankings, held):
        assert len(h.order) == math.ceil(0.3 * 6)
        assert len(r.order) == 6 - len(h.order)
        assert sorted(r.order + h.order) == list(range(6))
        # survivors keep their relative order
        full = (0, 1, 2, 3, 4, 5)
        assert tuple(a for a in full if a in r.order) == r.order


def test_mask_rankings_deterministic_and_varied():
    ds = Dataset(m=8, rankings=[Ranking(i, tuple(range(8))) for i in range(12)])
    a, _ = mask_rankings(ds, 0.25, seed=3)
    b, _ = mask_rankings(ds, 0.25, seed=3)
    c, _ = mask_rankings(ds, 0.25, seed=4)
    assert a.rankings == b.rankings
    assert a.rankings != c.rankings
    # different agents get different masks
    assert len({r.order for r in a.rankings}) > 1


def test_mask_zero_fraction_is_identity():
    ds = Dataset(m=4, rankings=[Ranking(0, (2, 0, 1))])
    masked, held = mask_rankings(ds, 0.0, seed=0)
    assert masked.rankings == ds.rankings
    assert held[0].order == ()


def test_mask_fraction_validated():
    ds = Dataset(m=2, rankings=[Ranking(0, (0, 1))])
    with pytest.raises(ValueError):
        mask_rankings(ds, 1.0, seed=0)


# --- truth matrix ----------------------------------------------------------------


def test_true_preference_matrix_matches_direct_computation():
    rankings = [Ranking(0, (0, 1, 2)), Ranking(1, (0, 2, 1)), Ranking(2, (1, 0))]
    p = true_preference_matrix(rankings, 3, resolution=120)
    # pair (0,1): counts (2,1,0)
    c = certainty(PairCounts(2, 1, 0), resolution=120)
    assert p[0, 1] == pytest.approx(2 / 3 * c)
    assert p[1, 0] == pytest.approx(1 / 3 * c)
    assert np.all(np.diag(p) == 0.0)


# --- fast completion equals the reference implementation ---------------------------


def test_complete_fast_matches_completion_module():
    rng = np.random.default_rng(0)
    for trial in range(10):
        m = int(rng.integers(3, 7))
        n = int(rng.integers(5, 12))
        rankings = []
        for i in range(n):
            size = int(rng.integers(2, m + 1))
            rankings.append(Ranking(i, tuple(rng.permutation(m)[:size].tolist())))
        ds = Dataset(m=m, rankings=rankings)
        signs = pair_sign_matrix(ds)
        pres = _presence_of(ds.rankings, m)
        th = DecisionThresholds()
        for method in ("baseline", "certainty"):
            # reference path: all agents except 0 as the neighbor set
            ref = complete_for_target(
                ds, None, target=0, k=n - 1, method=method, th=th, resolution=120
            )
            sub = [j for j in range(n) if j != 0]
            fast = _complete_fast(signs[sub], pres[sub], m, method, th, 120, agent=0)
            assert fast.order == ref.order, (trial, method)


# --- experiment runs ---------------------------------------------------------------


def test_run_experiment_synthetic_outputs(tmp_path):
    cfg = small_synth_config(output_dir=str(tmp_path))
    result = run_experiment(cfg)
    for name in ("combined.csv", "fig3_rmse.csv", "fig4_bias.csv", "fig5_pre.csv"):
        path = tmp_path / name
        assert path.exists() and path.stat().st_size > 0
    assert {row["method"] for row in result.rows} == set(cfg.methods)
    assert {row["k"] for row in result.rows} == set(cfg.k_grid)
    for row in result.rows:
        assert 0.0 <= row["bias"] <= 1.0
        assert 0.5 <= row["precision5"] <= 1.0
        assert row["rmse"] > 0.0


def test_run_experiment_deterministic(tmp_path):
    a_dir, b_dir = tmp_path / "a", tmp_path / "b"
    run_experiment(small_synth_config(output_dir=str(a_dir)))
    run_experiment(small_synth_config(output_dir=str(b_dir)))
    for name in ("combined.csv", "fig3_rmse.csv", "fig4_bias.csv", "fig5_pre.csv"):
        assert (a_dir / name).read_bytes() == (b_dir / name).read_bytes()


def test_run_experiment_epsilon0_excludes_low_trust(tmp_path):
    # with a high trust cutoff only the most trusted agents stay candidates;
    # the run must still finish and the anchor rows must be unaffected
    base = small_synth_config(output_dir=str(tmp_path / "a"), k_grid=(3,))
    cut = small_synth_config(output_dir=str(tmp_path / "b"), k_grid=(3,), epsilon0=0.5)
    rows_a = {(r["method"], r["k"]): r for r in run_experiment(base).rows}
    rows_b = {(r["method"], r["k"]): r for r in run_experiment(cut).rows}
    for comp in ("baseline", "certainty"):
        a = rows_a[(f"anchor+{comp}", 3)]
        b = rows_b[(f"anchor+{comp}", 3)]
        assert a == b


def test_run_experiment_preflib(tmp_path):
    cfg = ExperimentConfig(
        source=PreflibSource(path=FIXTURE),
        k_grid=(3, 5),
        mask_fraction=0.3,
        master_seed=1,
        resolution=120,
        output_dir=str(tmp_path),
        methods=("anchor+baseline", "trust-anchor+certainty"),
    )
    result = run_experiment(cfg)
    assert (tmp_path / "fig6_bias_real.csv").exists()
    assert (tmp_path / "fig7_pre_real.csv").exists()
    assert not (tmp_path / "fig3_rmse.csv").exists()
    assert all("rmse" not in row for row in result.rows)


def test_run_experiment_k_grid_too_large():
    cfg = small_synth_config(k_grid=(40,))
    with pytest.raises(ValueError):
        run_experiment(cfg)


def test_output_dir_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("PREFCOMPLETE_OUTPUT_DIR", str(tmp_path / "from_env"))
    cfg = small_synth_config(targets=3)
    run_experiment(cfg)
    assert (tmp_path / "from_env" / "combined.csv").exists()


# --- config parsing ------------------------------------------------------------------


def test_config_validation():
    with pytest.raises(ValueError):
        small_synth_config(methods=("bogus+baseline",))
    with pytest.raises(ValueError):
        small_synth_config(k_grid=(5, 3))
    with pytest.raises(ValueError):
        small_synth_config(k_grid=())
    with pytest.raises(ValueError):
        small_synth_config(mask_fraction=1.5)


def test_parse_config_file(tmp_path):
    cfg_file = tmp_path / "exp.cfg"
    cfg_file.write_text(
        "# synthetic run\n"
        "source = synthetic\n"
        "n = 40\n"
        "m = 6\n"
        "k_grid = 5,10\n"
        "noise_scale = 0.4\n"
        "master_seed = 3\n"
    )
    values = parse_config_file(cfg_file)
    cfg = config_from_mapping(values)
    assert isinstance(cfg.source, SyntheticSource)
    assert cfg.source.config.n == 40
    assert cfg.k_grid == (5, 10)
    assert cfg.master_seed == 3


def test_parse_config_file_rejects_unknown_key(tmp_path):
    cfg_file = tmp_path / "bad.cfg"
    cfg_file.write_text("bogus = 1\n")
    with pytest.raises(ValueError, match="unknown config key"):
        parse_config_file(cfg_file)


def test_parse_config_file_rejects_bad_line(tmp_path):
    cfg_file = tmp_path / "bad.cfg"
    cfg_file.write_text("just words\n")
    with pytest.raises(ValueError, match="key = value"):
        parse_config_file(cfg_file)


def test_config_from_mapping_preflib():
    cfg = config_from_mapping(
        {"source": "preflib", "preflib_path": FIXTURE, "subsample": "12", "k_grid": "2,4"}
    )
    assert isinstance(cfg.source, PreflibSource)
    assert cfg.source.subsample_count == 12


def test_config_from_mapping_requires_preflib_path():
    with pytest.raises(ValueError, match="preflib_path"):
        config_from_mapping({"source": "preflib"})


def test_config_from_mapping_unknown_source():
    with pytest.raises(ValueError, match="unknown data source"):
        config_from_mapping({"source": "csv"})
