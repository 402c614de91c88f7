"""Closed-form effects of the size-informative design next to Monte Carlo.

For each pair of size labels the closed forms of the cluster-level effect
p and the observation-level effect p0 are compared with a brute-force
oracle that simulates the data-generating process directly.
"""

from clusterwmw import mc_effect_oracle, theoretical_effects

PAIRS = [(1, 1), (1, 2), (2, 3), (1, 5), (3, 3), (2, 8)]

print(f"{'c1':>3} {'c2':>3} {'p':>8} {'p_mc':>8} {'p0':>8} {'p0_mc':>8}")
for c1, c2 in PAIRS:
    eff = theoretical_effects(c1, c2)
    orc = mc_effect_oracle(c1, c2, 200_000, rng=c1 * 100 + c2)
    print(f"{c1:3d} {c2:3d} {eff.p:8.4f} {orc.p_mc:8.4f} {eff.p0:8.4f} {orc.p0_mc:8.4f}")
