"""
Doubling ratios: reading a dataset's difficulty off its geometry
================================================================

gamma is the smallest observed growth factor when the neighbour rank doubles;
1/log2(gamma) is the matching intrinsic-dimension estimate. It is a worst-case
floor: one flat neighbourhood anywhere in the data drags gamma toward 1, so
the answer depends hard on tau — the population scale at which you demand the
guarantee.
"""

import numpy as np

from projknn import Dataset, estimate_global_sparsity, suggest_k_tilde, synth_dataset

n, d = 256, 8

# textbook case: a uniform cube fills all d dimensions, gamma ~ 2^(1/d)
cube = synth_dataset("uniform-cube", n, d, seed=3)
print("uniform cube:")
for tau in (4, 16, 64):
    prof = estimate_global_sparsity(cube, tau=tau)
    print(
        f"  tau={tau:<3} gamma={prof.gamma:.4f}  "
        f"intrinsic d ~ {prof.intrinsic_dim:.1f} (ambient {d})"
    )

# two equal tight clusters, far apart: whether gamma sees the gap is purely
# a question of tau
rng = np.random.default_rng(5)
half = n // 2
blob = rng.standard_normal((half, d)) * 0.01
gap = np.zeros(d)
gap[0] = 50.0
pair = Dataset(list(range(n)), np.vstack([blob, blob + gap]))

print("\nbalanced cluster pair, gap 50:")
for tau in (16, half // 2):
    prof = estimate_global_sparsity(pair, tau=tau)
    print(
        f"  tau={tau:<3} gamma={prof.gamma:10.1f}  "
        f"intrinsic d ~ {prof.intrinsic_dim:.3f}"
    )

# tau=16: doubling a 16-point ball stays inside a 128-point cluster -> flat,
#         gamma near 1, the gap is invisible
# tau=64: doubling any counted ball must jump the gap -> gamma ~ gap/diameter

# the query-budget heuristic consumes gamma directly
for tau in (16, half // 2):
    g = estimate_global_sparsity(pair, tau=tau).gamma
    print(f"  suggest_k_tilde(n={n}, k=10, gamma@tau={tau}) = {suggest_k_tilde(n, 10, g)}")

# randomly sized clusters are a different story: some point always sits in a
# neighbourhood that doubles flatly, and the minimum finds it
mix = synth_dataset("gaussian-mixture", n, d, seed=3, clusters=4, spread=0.05)
prof = estimate_global_sparsity(mix, tau=64)
print(f"\nrandom-size mixture: tau=64 gamma={prof.gamma:.4f} (worst case rules)")
