"""How evidence about one alternative pair turns into certainty and conflict.

For a pair (A, B), neighbors contribute weighted tallies: n_AB rankings say
"A before B", n_BA say the opposite, and n_unordered saw at most one of the
two. The tallies define a Dirichlet posterior over pair-preference
probabilities; certainty is how far that posterior sits from the uniform
prior (total variation), and conflict is the smaller directional share.
"""

import numpy as np

from prefcomplete.pairstats import (
    DecisionThresholds,
    PairCounts,
    certainty,
    certainty_mc_oracle,
    conflict,
    decide,
    to_preference,
)

# More one-sided evidence -> higher certainty.
print("evidence grows, certainty grows:")
for n_ab in (1, 2, 4, 8, 16):
    pc = PairCounts(n_ab=n_ab, n_ba=1, n_unordered=2)
    print(f"  {n_ab:>2} vs 1 (2 unordered): certainty={certainty(pc):.4f}")

# A perfectly split pair is maximally conflicted, and certainty is at its
# lowest for that evidence volume.
print("\nsplit evidence at total 10:")
for n_ab in range(0, 11, 2):
    pc = PairCounts(n_ab=n_ab, n_ba=10 - n_ab, n_unordered=0)
    print(
        f"  {n_ab:>2}:{10 - n_ab:<2} certainty={certainty(pc):.4f} "
        f"conflict={conflict(pc):.2f}"
    )

# The quadrature value agrees with an independent Monte-Carlo estimate.
pc = PairCounts(n_ab=6, n_ba=2, n_unordered=3)
q = certainty(pc)
mc = certainty_mc_oracle(pc, samples=10**6, seed=0)
print(f"\nquadrature {q:.5f} vs Monte-Carlo {mc:.5f} (diff {abs(q - mc):.1e})")

# The triple (preference, dispreference, uncertainty) feeds a three-way
# decision: prefer A, prefer B, or leave the pair undecided.
th = DecisionThresholds(epsilon1=0.8, epsilon2=0.05)
for counts in (PairCounts(9, 1, 0), PairCounts(5, 5, 0), PairCounts(1, 1, 8)):
    t = to_preference(counts)
    print(
        f"counts=({counts.n_ab:.0f},{counts.n_ba:.0f},{counts.n_unordered:.0f}) "
        f"p+={t.p_plus:.3f} p-={t.p_minus:.3f} c-={t.c_minus:.3f} "
        f"-> {decide(t, th).name}"
    )
