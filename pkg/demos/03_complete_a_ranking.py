"""Complete one agent's partial ranking from its trustworthy neighbors.

The completion pipeline: find neighbors, tally their pairwise votes into
weighted counts, convert each pair's counts into (preference,
dispreference, uncertainty), gate uncertain or narrow pairs, and rank
alternatives by their accumulated pairwise support.
"""

from prefcomplete.completion import complete_for_target
from prefcomplete.model import Dataset, Ranking
from prefcomplete.pairstats import DecisionThresholds
from prefcomplete.synth import PlackettLuceConfig, derive_trust, sample_dataset_with_noise

cfg = PlackettLuceConfig(
    n=200, m=8, d=1,
    noise_scale=0.003, latent_box=(0.0, 10.0),
    noisy_fraction=0.4, noisy_multiplier=1000.0, noise_spread=30.0,
    seed=3,
)
ds, noise = sample_dataset_with_noise(cfg)
trust = derive_trust(cfg, noise)

# Complete the most careful agent's ballot: a noisy agent's "true" ranking
# is mostly its own noise, which no amount of neighbor evidence can recover.
# Keep the top 5 of 8 alternatives; the neighbor search measures agreement
# on the observed items, so a very short prefix leaves it little to go on.
target = int(trust.values.argmax())
full = ds.rankings[target]
partial = Ranking(target, full.order[:5])
rankings = list(ds.rankings)
rankings[target] = partial
observed = Dataset(m=ds.m, rankings=rankings,
                   latent_agents=ds.latent_agents,
                   latent_alternatives=ds.latent_alternatives)

print(f"true order:     {full.order}")
print(f"observed order: {partial.order}  (3 of 8 hidden)")

for method in ("baseline", "certainty"):
    predicted = complete_for_target(
        observed,
        trust,
        target=target,
        k=25,
        method=method,
        th=DecisionThresholds(epsilon1=0.8, epsilon2=0.05),
    )
    agree = sum(
        1
        for i in range(len(full.order))
        for j in range(i + 1, len(full.order))
        if predicted.order.index(full.order[i]) < predicted.order.index(full.order[j])
    )
    total = len(full.order) * (len(full.order) - 1) // 2
    print(f"{method:>9}: {predicted.order}  pairwise agreement {agree}/{total}")
