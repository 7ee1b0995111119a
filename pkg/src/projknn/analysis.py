"""Closed-form projection-order bounds and dataset sparsity diagnostics."""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .data import Dataset

_TWO_OVER_PI = 2.0 / math.pi


@dataclass(frozen=True)
class SparsityProfile:
    """Doubling profile of a dataset: gamma is the smallest observed radius
    growth needed to double a neighbourhood's population (at ranks >= tau);
    intrinsic_dim = 1/log2(gamma), with an infinity sentinel at gamma = 1."""

    tau: int
    gamma: float
    intrinsic_dim: float = field(init=False)

    def __post_init__(self):
        idim = math.inf if self.gamma <= 1.0 else 1.0 / math.log2(self.gamma)
        object.__setattr__(self, "intrinsic_dim", idim)


def inversion_bound(short_len, long_len):
    """Upper bound on the probability that a random projection orders a
    longer vector before a shorter one: 1 - (2/pi) * arccos(short/long).

    Monotonically nondecreasing in the length ratio; dimension-independent.
    """
    if short_len <= 0:
        raise ValueError(f"short_len must be positive, got {short_len!r}")
    if short_len > long_len:
        raise ValueError(
            f"short_len={short_len!r} must not exceed long_len={long_len!r}"
        )
    ratio = min(short_len / long_len, 1.0)
    return 1.0 - _TWO_OVER_PI * math.acos(ratio)


def monte_carlo_inversion_rate(v_short, v_long, trials, seed):
    """Fraction of random directions u with |<v_long, u>| <= |<v_short, u>|.

    Directions are standard normal draws; the comparison is scale-invariant
    in u, so normalizing to unit length would not change the outcome.
    """
    vs = np.asarray(v_short, dtype=np.float64)
    vl = np.asarray(v_long, dtype=np.float64)
    if vs.shape != vl.shape or vs.ndim != 1:
        raise ValueError("v_short and v_long must be 1-D vectors of equal dimension")
    ns = float(np.linalg.norm(vs))
    nl = float(np.linalg.norm(vl))
    if ns == 0.0 or nl == 0.0:
        raise ValueError("zero vectors are not allowed")
    if ns >= nl:
        raise ValueError(f"need ||v_short|| < ||v_long||, got {ns!r} >= {nl!r}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials!r}")
    rng = np.random.default_rng(seed)
    d = vs.size
    chunk = max(1, (1 << 22) // d)
    count = 0
    done = 0
    while done < trials:
        c = min(chunk, trials - done)
        U = rng.standard_normal((c, d))
        count += int(np.count_nonzero(np.abs(U @ vl) <= np.abs(U @ vs)))
        done += c
    return count / trials


def estimate_global_sparsity(points, tau):
    """Smallest observed doubling ratio over all points and ranks >= tau.

    For each point, the other points are sorted by distance; for every rank
    r >= tau with rank 2r available (2r <= n-1), the ratio
    dist(rank 2r)/dist(rank r) is a doubling observation. Ranks with zero
    distance (duplicate points) are skipped; if everything is skipped the
    profile degenerates to gamma = 1. O(n^2 log n) — a diagnostic for
    desk-scale data or samples, not an index-time operation.
    """
    data = Dataset.coerce(points)
    n = len(data)
    if not isinstance(tau, int) or tau < 1:
        raise ValueError(f"tau must be a positive integer, got {tau!r}")
    if n < 2 * tau:
        raise ValueError(f"need n >= 2*tau points, got n={n}, tau={tau}")
    dists = cdist(data.coords, data.coords)
    ranks = np.arange(tau, (n - 1) // 2 + 1)
    gamma = math.inf
    for i in range(n):
        ds = np.sort(np.delete(dists[i], i))
        if ranks.size == 0:
            continue
        dr = ds[ranks - 1]
        d2r = ds[2 * ranks - 1]
        ok = dr > 0
        if ok.any():
            low = float((d2r[ok] / dr[ok]).min())
            if low < gamma:
                gamma = low
    if not math.isfinite(gamma):
        gamma = 1.0
    return SparsityProfile(tau=tau, gamma=max(gamma, 1.0))
