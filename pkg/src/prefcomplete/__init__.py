"""Trustworthy preference completion.

Find trustworthy nearest-neighbor agents from partial rankings, quantify
per-pair preference certainty and conflict with a Dirichlet-posterior
measure, and complete each agent's ranking over all alternatives.
"""

from .completion import (
    certainty_scores,
    complete_for_target,
    complete_ranking,
    majority_completion,
    pair_triples,
    vote_matrix,
)
from .distance import (
    cached_feature_matrix,
    feature_matrix,
    load_feature_matrix,
    normalized_kendall_tau,
    save_feature_matrix,
)
from .harness import (
    ExperimentConfig,
    ExperimentResult,
    PreflibSource,
    SyntheticSource,
    mask_rankings,
    run_experiment,
)
from .metrics import MetricWeights, UnsupportedMetricError, bias, pre_score, precision_at_5, rmse
from .model import Dataset, Ranking, TrustVector, common_alternatives, rank_position
from .neighbors import (
    NeighborList,
    NeighborQuery,
    NoCandidatesError,
    anchor_distance,
    anchor_knn,
    kt_knn,
    trust_anchor_knn,
)
from .pairstats import (
    Decision,
    DecisionThresholds,
    PairCounts,
    PreferenceTriple,
    SimplexPoint,
    certainty,
    certainty_mc_many,
    certainty_mc_oracle,
    conflict,
    decide,
    log_normalizer,
    pair_counts,
    posterior_density,
    to_preference,
)
from .preflib import (
    PreflibParseError,
    UnsupportedTiesError,
    parse_preflib,
    serialize_preflib,
    subsample,
    write_csv,
    write_preflib,
)
from .synth import (
    PlackettLuceConfig,
    derive_trust,
    realized_utilities,
    sample_dataset,
    sample_dataset_with_noise,
    sample_gumbel,
)

__version__ = "0.1.0"
