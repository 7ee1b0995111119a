"""Retrieval over a VoteIndex: the outer cursor loop and its two stop rules.

Each outer iteration advances every simple index's cursor one step outward
from the query's projection. A point becomes a candidate of composite l the
moment all m of l's cursors have yielded it; candidates get their true
distance immediately. The loop stops after a fixed iteration budget, or — in
adaptive mode — once an upper bound on the probability that some true
neighbour is still missing drops to epsilon.
"""

import math
from bisect import insort
from dataclasses import dataclass
from enum import Enum

from .data import Point, as_coords, euclidean_distances

_TWO_OVER_PI = 2.0 / math.pi


class Termination(Enum):
    BUDGET_EXHAUSTED = "BudgetExhausted"
    TEST_PASSED = "TestPassed"
    DATASET_EXHAUSTED = "DatasetExhausted"


@dataclass(frozen=True)
class FixedIterations:
    """Run the outer loop for k_tilde iterations (dataset permitting)."""

    k_tilde: int

    def __post_init__(self):
        if not isinstance(self.k_tilde, int) or self.k_tilde < 1:
            raise ValueError(f"k_tilde must be a positive integer, got {self.k_tilde!r}")


@dataclass(frozen=True)
class Adaptive:
    """Run until the miss-probability bound drops to epsilon."""

    epsilon: float

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon!r}")


@dataclass(frozen=True)
class QueryParams:
    k: int
    mode: object

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k!r}")
        if not isinstance(self.mode, (FixedIterations, Adaptive)):
            raise TypeError(f"mode must be FixedIterations or Adaptive, got {self.mode!r}")
        if isinstance(self.mode, FixedIterations) and self.mode.k_tilde < self.k:
            raise ValueError(
                f"k_tilde={self.mode.k_tilde} must be at least k={self.k}"
            )


@dataclass(frozen=True)
class QueryReport:
    """k neighbours with true distances, plus retrieval accounting."""

    neighbours: tuple          # ((id, distance), ...) sorted by (distance, id)
    unique_candidates: int
    outer_iterations: int
    termination: Termination


def stopping_test(kth_dist, max_dists, m, L, epsilon):
    """Adaptive stop rule: product over composites of
    1 - ((2/pi) * arccos(kth_dist / max_dists[l]))**m, compared to epsilon.

    Each factor bounds the probability that composite l still hides a point
    closer than the current k-th candidate given the farthest distance it
    has certified so far. Ratios are clamped to [0, 1]; a composite with no
    candidate yet (max_dist 0 while kth_dist > 0) contributes a factor of 1,
    so it can never cause an early stop. kth_dist == 0 passes outright.
    """
    if kth_dist == 0.0:
        return True
    prod = 1.0
    for md in max_dists:
        if md <= 0.0:
            ratio = 1.0
        else:
            ratio = kth_dist / md
            if ratio > 1.0:
                ratio = 1.0
        prod *= 1.0 - (_TWO_OVER_PI * math.acos(ratio)) ** m
    return prod <= epsilon


def suggest_k_tilde(n, k, gamma, c=1.0):
    """Iteration budget that makes fixed-mode retrieval reliable:
    clamp(ceil(c * max(k*log2(n/k), k*(n/k)**(1 - log2(gamma)))), k, n).

    gamma is the dataset's doubling ratio (see analysis.estimate_global_sparsity);
    gamma = 1 degenerates to n, i.e. exhaustive search.
    """
    if not (isinstance(n, int) and isinstance(k, int) and n >= k >= 1):
        raise ValueError(f"need integers n >= k >= 1, got n={n!r}, k={k!r}")
    if gamma < 1.0:
        raise ValueError(f"gamma must be >= 1, got {gamma!r}")
    if c <= 0.0:
        raise ValueError(f"c must be positive, got {c!r}")
    t1 = k * math.log2(n / k)
    t2 = k * (n / k) ** (1.0 - math.log2(gamma))
    return max(k, min(n, math.ceil(c * max(t1, t2))))


def query(index, q, params):
    """Retrieve the k nearest neighbours of q from a VoteIndex.

    q may be a Point or a plain coordinate vector. Returns a QueryReport;
    neighbours are the k closest unique candidates by true Euclidean
    distance, ties broken by id.

    In fixed mode the loop runs k_tilde outer iterations; if votes are still
    too spread for k unique candidates to exist at that point, it keeps
    going until they do (termination is still reported as BudgetExhausted).
    Either mode falls back to DatasetExhausted once every point is a
    candidate.
    """
    if not isinstance(params, QueryParams):
        raise TypeError(f"params must be QueryParams, got {params!r}")
    n = len(index)
    if n == 0:
        raise ValueError("query on an empty index")
    qarr = q.coords if isinstance(q, Point) else as_coords(q)
    if qarr.size != index.dim:
        raise ValueError(f"query has dimension {qarr.size}, index has d={index.dim}")
    k = params.k
    if k > n:
        raise ValueError(f"k={k} exceeds dataset size n={n}")
    mode = params.mode
    adaptive = isinstance(mode, Adaptive)
    if adaptive:
        epsilon = mode.epsilon
        k_tilde = 0
    else:
        epsilon = 0.0
        k_tilde = mode.k_tilde
        if k_tilde > n:
            raise ValueError(f"k_tilde={k_tilde} exceeds dataset size n={n}")

    m, L = index.m, index.L
    qkeys = index._project(qarr)
    simple = index._simple
    groups = [
        tuple(simple[l * m + j]._node_cursor(float(qkeys[l * m + j])) for j in range(m))
        for l in range(L)
    ]
    cap = len(index._row_ids)
    counts = [bytearray(cap) if m < 256 else [0] * cap for _ in range(L)]
    coords = index._coords
    dist_of = {}           # row -> true distance, computed once per unique id
    dist_of_get = dist_of.get
    best = []              # (distance, id), sorted, capped at k
    maxdist = [0.0] * L
    iters = 0
    while True:
        iters += 1
        for l in range(L):
            cnt = counts[l]
            for cur in groups[l]:
                node = next(cur, None)
                if node is None:
                    continue
                row = node.val
                c = cnt[row] + 1
                cnt[row] = c
                if c == m:
                    dist = dist_of_get(row)
                    if dist is None:
                        dist = float(euclidean_distances(coords[row : row + 1], qarr)[0])
                        dist_of[row] = dist
                        if len(best) < k:
                            insort(best, (dist, node.id))
                        elif (dist, node.id) < best[-1]:
                            insort(best, (dist, node.id))
                            del best[-1]
                    if dist > maxdist[l]:
                        maxdist[l] = dist
        unique = len(dist_of)
        if unique == n:
            term = Termination.DATASET_EXHAUSTED
            break
        if adaptive:
            if unique >= k and stopping_test(best[k - 1][0], maxdist, m, L, epsilon):
                term = Termination.TEST_PASSED
                break
        elif iters >= k_tilde and unique >= k:
            term = Termination.BUDGET_EXHAUSTED
            break
    return QueryReport(
        neighbours=tuple((pid, dist) for dist, pid in best),
        unique_candidates=len(dist_of),
        outer_iterations=iters,
        termination=term,
    )
