"""Exact brute-force oracle and a simplified Euclidean LSH baseline."""

import numpy as np

from .data import Dataset, Point, as_coords, euclidean_distances


def _query_coords(q):
    return q.coords if isinstance(q, Point) else as_coords(q)


def _rank(ids, dists, k):
    """Indices of the k smallest distances, ties broken by id."""
    try:
        order = np.lexsort((ids, dists))
    except TypeError:  # ids not lexsortable (e.g. mixed types)
        order = sorted(range(len(dists)), key=lambda i: (dists[i], ids[i]))
    return order[:k]


def brute_force_knn(points, q, k):
    """Exact k nearest neighbours of q: k (id, distance) pairs sorted by
    (distance, id). Deterministic, bit-for-bit reproducible."""
    data = Dataset.coerce(points)
    n = len(data)
    if not isinstance(k, int) or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    if n < k:
        raise ValueError(f"k={k} exceeds dataset size n={n}")
    qarr = _query_coords(q)
    if qarr.size != data.dim:
        raise ValueError(f"query has dimension {qarr.size}, dataset has d={data.dim}")
    dists = euclidean_distances(data.coords, qarr)
    order = _rank(data.ids_array, dists, k)
    return [(data.ids[i], float(dists[i])) for i in order]


class LshIndex:
    """T hash tables of H concatenated floor hashes ⌊(a·p + b)/w⌋.

    a rows are i.i.d. standard normal, b is uniform in [0, w). Each point
    lands in exactly one bucket per table. The per-point key vector is
    computed with the same flat matrix-vector product at build and query
    time, so a query equal to a dataset point always shares its buckets.
    """

    def __init__(self, points, n_hashes, n_tables, width, seed):
        data = Dataset.coerce(points)
        if not isinstance(n_hashes, int) or n_hashes < 1:
            raise ValueError(f"n_hashes must be a positive integer, got {n_hashes!r}")
        if not isinstance(n_tables, int) or n_tables < 1:
            raise ValueError(f"n_tables must be a positive integer, got {n_tables!r}")
        if not width > 0:
            raise ValueError(f"width must be positive, got {width!r}")
        self._data = data
        self.n_hashes = n_hashes
        self.n_tables = n_tables
        self.width = float(width)
        self.seed = seed
        rng = np.random.default_rng(seed)
        d = data.dim
        # draw order: projection rows, then offsets
        self._A = rng.standard_normal((n_tables * n_hashes, d))
        self._B = rng.uniform(0.0, self.width, n_tables * n_hashes)
        self._tables = [dict() for _ in range(n_tables)]
        for row in range(len(data)):
            for t, key in enumerate(self._keys(data.coords[row])):
                self._tables[t].setdefault(key, []).append(row)

    def _keys(self, coords):
        flat = np.floor((self._A @ coords + self._B) / self.width).astype(np.int64)
        h = self.n_hashes
        return [flat[t * h : (t + 1) * h].tobytes() for t in range(self.n_tables)]

    def query(self, q, k):
        """Rank the union of q's buckets; return (up to k (id, distance)
        pairs, unique candidate count). An empty union returns ([], 0)
        rather than an error — the miss is the caller's to record."""
        if not isinstance(k, int) or k < 1:
            raise ValueError(f"k must be a positive integer, got {k!r}")
        data = self._data
        qarr = _query_coords(q)
        if qarr.size != data.dim:
            raise ValueError(f"query has dimension {qarr.size}, dataset has d={data.dim}")
        rows = set()
        for t, key in enumerate(self._keys(qarr)):
            bucket = self._tables[t].get(key)
            if bucket is not None:
                rows.update(bucket)
        if not rows:
            return [], 0
        rows = sorted(rows)
        dists = euclidean_distances(data.coords[rows], qarr)
        sub_ids = data.ids_array[rows]
        order = _rank(sub_ids, dists, k)
        return [(data.ids[rows[i]], float(dists[i])) for i in order], len(rows)


def median_pairwise_distance(points, sample=1024, seed=0):
    """Median distance over all pairs of a (seeded) sample of the dataset."""
    from scipy.spatial.distance import pdist

    data = Dataset.coerce(points)
    n = len(data)
    if n < 2:
        raise ValueError(f"need at least 2 points, got {n}")
    if n > sample:
        rng = np.random.default_rng(seed)
        rows = np.sort(rng.choice(n, size=sample, replace=False))
        coords = data.coords[rows]
    else:
        coords = data.coords
    return float(np.median(pdist(coords)))


def suggest_w_grid(points, n_hashes, sample=1024, seed=0):
    """Default bucket-width sweep: {0.5, 1, 2, 4} x median pairwise
    distance / sqrt(n_hashes). A heuristic surrogate for per-dataset width
    tuning; sweep and keep the best per quality target."""
    base = median_pairwise_distance(points, sample=sample, seed=seed)
    base /= float(n_hashes) ** 0.5
    return tuple(f * base for f in (0.5, 1.0, 2.0, 4.0))
