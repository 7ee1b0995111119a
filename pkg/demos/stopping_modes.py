"""
Fixed budget vs adaptive stopping on the same index
===================================================

Sweeps the iteration budget k-tilde and the miss-probability target epsilon
over one clustered dataset and prints the cost/accuracy trade-off of each.
Cost is unique candidates (points whose true distance got computed); accuracy
is the k-th neighbour distance ratio against the exhaustive answer.
"""

import numpy as np

from projknn import (
    Adaptive,
    Dataset,
    FixedIterations,
    QueryParams,
    VoteIndex,
    approximation_ratio,
    brute_force_knn,
    query,
    synth_dataset,
)

K = 10
blob = synth_dataset("gaussian-mixture", 2100, 32, seed=11, clusters=8, spread=0.15)
data = Dataset(list(range(2000)), blob.coords[:2000])
queries = blob.coords[2000:]
index = VoteIndex.construct(data, m=6, L=3, seed=99)
oracle = [brute_force_knn(data, q, K) for q in queries]


def sweep(label, modes):
    print(f"\n{label:<14} {'mean cand':>10} {'mean ratio':>11} {'stops':>22}")
    print("-" * 60)
    for name, mode in modes:
        cands, ratios, stops = [], [], {}
        for q, want in zip(queries, oracle):
            r = query(index, q, QueryParams(K, mode))
            cands.append(r.unique_candidates)
            ratios.append(approximation_ratio(r.neighbours, want))
            stops[r.termination.value] = stops.get(r.termination.value, 0) + 1
        stop_s = " ".join(f"{k}:{v}" for k, v in sorted(stops.items()))
        print(
            f"{name:<14} {np.mean(cands):>10.1f} {np.mean(ratios):>11.4f} "
            f"{stop_s:>22}"
        )


sweep(
    "k_tilde",
    [(f"kt={kt}", FixedIterations(kt)) for kt in (50, 150, 400, 1000, 2000)],
)
sweep(
    "epsilon",
    [(f"eps={e}", Adaptive(e)) for e in (0.9, 0.5, 0.2, 0.05)],
)

# the adaptive rows buy their accuracy with a per-query budget: easy queries
# (deep inside a cluster) stop early, stragglers keep drilling
