"""
Build an index, query it both ways, then edit it in place
==========================================================

Walk-through of the core object lifecycle: construct from a dataset,
query with a fixed iteration budget and with the adaptive stopping test,
insert a point that becomes the new nearest neighbour, delete it again.
"""

import numpy as np

from projknn import (
    Adaptive,
    Dataset,
    FixedIterations,
    Point,
    QueryParams,
    VoteIndex,
    query,
    synth_dataset,
)

# two well-separated gaussian blobs, 300 points in 12 dimensions
data = synth_dataset("gaussian-mixture", 300, 12, seed=7, clusters=2, spread=0.5)
index = VoteIndex.construct(data, m=5, L=2, seed=42)
print(f"index: n={len(index)} d={index.dim} m={index.m} L={index.L}")

q = data.coords[17] + 0.05  # probe near a known point

# fixed budget: stop after k-tilde outer iterations (but never before k hits)
for k_tilde in (10, 50, 300):
    r = query(index, q, QueryParams(k=3, mode=FixedIterations(k_tilde)))
    ids = [i for i, _ in r.neighbours]
    print(
        f"k_tilde={k_tilde:4d}  ids={ids}  candidates={r.unique_candidates:3d}  "
        f"iterations={r.outer_iterations:3d}  {r.termination.value}"
    )

# adaptive: stop once the estimated miss probability drops below epsilon
for eps in (0.5, 0.1, 0.01):
    r = query(index, q, QueryParams(k=3, mode=Adaptive(eps)))
    print(
        f"epsilon={eps:<5}  candidates={r.unique_candidates:3d}  "
        f"iterations={r.outer_iterations:3d}  {r.termination.value}"
    )

# drop a new point right on top of the query: it must take over rank 1
index.insert(Point("intruder", q))
r = query(index, q, QueryParams(k=3, mode=Adaptive(0.1)))
print("after insert:", r.neighbours[0])

index.delete("intruder")
r = query(index, q, QueryParams(k=3, mode=Adaptive(0.1)))
print("after delete:", r.neighbours[0])

# updates are exact: a fresh index over the same points answers identically
fresh = VoteIndex.construct(
    Dataset(list(data.ids), data.coords), m=5, L=2, seed=42
)
assert query(fresh, q, QueryParams(3, Adaptive(0.1))) == r
print("updated index == fresh index on this probe")
