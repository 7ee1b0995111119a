"""Dynamic k-NN search via ordered random-projection indices with voting.

Points are indexed m*L times along random unit directions; a query walks
each ordered index outward from its own projection and a point becomes a
distance-checked candidate once all m members of one of the L composites
have yielded it. Queries stop on a fixed iteration budget or adaptively,
when an upper bound on the probability of a missed true neighbour falls
below epsilon. Inserts and deletes are logarithmic per simple index.
"""

from .analysis import (
    SparsityProfile,
    estimate_global_sparsity,
    inversion_bound,
    monte_carlo_inversion_rate,
)
from .baselines import (
    LshIndex,
    brute_force_knn,
    median_pairwise_distance,
    suggest_w_grid,
)
from .bench import (
    BenchConfig,
    CsvRow,
    CurvePoint,
    aggregate_curves,
    approximation_ratio,
    load_dataset,
    run_bench,
    save_dataset,
    synth_dataset,
)
from .data import Dataset, Point, euclidean, euclidean_distances
from .index import SimpleIndex, VoteIndex
from .query import (
    Adaptive,
    FixedIterations,
    QueryParams,
    QueryReport,
    Termination,
    query,
    stopping_test,
    suggest_k_tilde,
)

__version__ = "0.1.0"

__all__ = [
    "Adaptive",
    "BenchConfig",
    "CsvRow",
    "CurvePoint",
    "Dataset",
    "FixedIterations",
    "LshIndex",
    "Point",
    "QueryParams",
    "QueryReport",
    "SimpleIndex",
    "SparsityProfile",
    "Termination",
    "VoteIndex",
    "aggregate_curves",
    "approximation_ratio",
    "brute_force_knn",
    "estimate_global_sparsity",
    "euclidean",
    "euclidean_distances",
    "inversion_bound",
    "load_dataset",
    "median_pairwise_distance",
    "monte_carlo_inversion_rate",
    "query",
    "run_bench",
    "save_dataset",
    "stopping_test",
    "suggest_k_tilde",
    "suggest_w_grid",
    "synth_dataset",
]
