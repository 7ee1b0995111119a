"""Benchmark harness: fold splits, method sweeps, ratio accounting, CSV/JSONL.

Protocol per fold: sample queries_per_fold points as queries, index the
rest, run every configured method against the exact oracle, and record per
query the unique candidate count (the implementation-independent work
proxy), the approximation ratio, and the termination reason. Output is one
CSV row per (method, param, fold) plus a JSON-lines per-query log, both
pure functions of (config, master seed).
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .baselines import LshIndex, brute_force_knn, suggest_w_grid
from .data import Dataset
from .index import VoteIndex
from .query import Adaptive, FixedIterations, QueryParams, query

CSV_HEADER = (
    "method,param_label,fold,mean_candidates,std_candidates,"
    "mean_ratio,std_ratio,failures,inf_ratios"
)


@dataclass
class BenchConfig:
    """Flat benchmark configuration (mirrors the key=value config file)."""

    data: str
    format: str = "csv"
    has_ids: bool = False
    k: int = 25
    folds: int = 10
    queries_per_fold: int = 100
    master_seed: int = 0
    include_exhaustive: bool = True
    include_vote: bool = True
    include_lsh: bool = True
    vote_m: int = 25
    vote_l: int = 2
    vote_k_tilde: object = "auto"  # "auto" = geometric {k, 2k, 4k, ..., n}
    vote_epsilon: tuple = (0.5, 0.2, 0.1, 0.05, 0.01)
    lsh_hashes: int = 24
    lsh_tables: int = 100
    lsh_w: object = "auto"  # "auto" = swept width grid from the data
    out_csv: str = "bench.csv"
    out_log: str = "bench_log.jsonl"


@dataclass(frozen=True)
class CsvRow:
    method: str
    param_label: str
    fold: int
    mean_candidates: float
    std_candidates: float
    mean_ratio: float
    std_ratio: float
    failures: int
    inf_ratios: int


@dataclass(frozen=True)
class CurvePoint:
    """One point of a work-vs-quality curve, aggregated across folds."""

    label: str
    mean_candidates: float
    mean_ratio: float
    std_ratio: float


def approximation_ratio(approx, exact):
    """k-th approximate distance / k-th true distance. 0/0 is defined as 1;
    a positive radius against a zero true radius is recorded as inf."""
    if len(approx) != len(exact):
        raise ValueError(f"length mismatch: {len(approx)} vs {len(exact)}")
    ak = float(approx[-1][1])
    ek = float(exact[-1][1])
    if ek == 0.0:
        return 1.0 if ak == 0.0 else math.inf
    return ak / ek


def derive_seed(*entropy):
    """Stable 64-bit seed from a tuple of integers (master seed, tags, fold)."""
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def fold_split(n, queries_per_fold, master_seed, fold):
    """Disjoint (query rows, data rows) for one fold; pure in its arguments."""
    rng = np.random.default_rng(np.random.SeedSequence((master_seed, 0, fold)))
    qrows = np.sort(rng.choice(n, size=queries_per_fold, replace=False))
    mask = np.ones(n, dtype=bool)
    mask[qrows] = False
    return qrows, np.flatnonzero(mask)


def _auto_k_tilde(k, n):
    grid = []
    v = k
    while v < n:
        grid.append(v)
        v *= 2
    grid.append(n)
    return grid


def _collect(results, method, param_label, fold, rows_out, log_lines):
    """Fold one method's per-query results into a CsvRow and log lines.

    results: (query_id, candidates, ratio, termination) per query, where a
    ratio of None marks a failed query (fewer than k returned). Failed
    queries and inf ratios are excluded from the means and counted in their
    own columns.
    """
    cands = [c for _, c, r, _ in results if r is not None]
    finite = [r for _, _, r, _ in results if r is not None and math.isfinite(r)]
    failures = sum(1 for _, _, r, _ in results if r is None)
    inf_ratios = sum(1 for _, _, r, _ in results if r is not None and math.isinf(r))
    rows_out.append(
        CsvRow(
            method=method,
            param_label=param_label,
            fold=fold,
            mean_candidates=float(np.mean(cands)) if cands else math.nan,
            std_candidates=float(np.std(cands)) if cands else math.nan,
            mean_ratio=float(np.mean(finite)) if finite else math.nan,
            std_ratio=float(np.std(finite)) if finite else math.nan,
            failures=failures,
            inf_ratios=inf_ratios,
        )
    )
    label = f"{method}[{param_label}]"
    for qid, cand, ratio, term in results:
        if ratio is None:
            jratio = None
        elif math.isinf(ratio):
            jratio = "inf"
        else:
            jratio = ratio
        log_lines.append(
            json.dumps(
                {
                    "fold": fold,
                    "query_id": qid,
                    "method": label,
                    "candidates": cand,
                    "ratio": jratio,
                    "termination": term,
                }
            )
        )


def run_bench(config):
    """Run the full protocol; write CSV and JSONL; return the CSV rows."""
    if config.folds < 1:
        raise ValueError(f"folds must be >= 1, got {config.folds}")
    if config.queries_per_fold < 1:
        raise ValueError(f"queries_per_fold must be >= 1, got {config.queries_per_fold}")
    if config.k < 1:
        raise ValueError(f"k must be >= 1, got {config.k}")
    if not (config.include_exhaustive or config.include_vote or config.include_lsh):
        raise ValueError("config grid is empty: no methods included")
    data = load_dataset(config.data, config.format, has_ids=config.has_ids)
    n = len(data)
    n_data = n - config.queries_per_fold
    if n_data < max(config.k, 1):
        raise ValueError(
            f"n={n} leaves only {n_data} data points per fold, need >= k={config.k}"
        )
    k = config.k
    rows_out = []
    log_lines = []
    for fold in range(config.folds):
        qrows, drows = fold_split(n, config.queries_per_fold, config.master_seed, fold)
        fold_data = Dataset([data.ids[i] for i in drows], data.coords[drows])
        queries = [(data.ids[i], data.coords[i]) for i in qrows]
        exact = [brute_force_knn(fold_data, qc, k) for _, qc in queries]

        if config.include_exhaustive:
            results = []
            for (qid, _), ex in zip(queries, exact):
                results.append((qid, n_data, approximation_ratio(ex, ex), None))
            _collect(results, "exhaustive", "full", fold, rows_out, log_lines)

        if config.include_vote:
            m, L = config.vote_m, config.vote_l
            index = VoteIndex.construct(
                fold_data, m, L, derive_seed(config.master_seed, 1, fold)
            )
            if config.vote_k_tilde == "auto":
                kt_grid = _auto_k_tilde(k, n_data)
            else:
                kt_grid = [kt for kt in config.vote_k_tilde if kt <= n_data]
            for kt in kt_grid:
                params = QueryParams(k, FixedIterations(int(kt)))
                results = []
                for (qid, qc), ex in zip(queries, exact):
                    rep = query(index, qc, params)
                    ratio = approximation_ratio(rep.neighbours, ex)
                    results.append(
                        (qid, rep.unique_candidates, ratio, rep.termination.value)
                    )
                _collect(results, "vote", f"m{m}.L{L}.kt{kt}", fold, rows_out, log_lines)
            for eps in config.vote_epsilon:
                params = QueryParams(k, Adaptive(float(eps)))
                results = []
                for (qid, qc), ex in zip(queries, exact):
                    rep = query(index, qc, params)
                    ratio = approximation_ratio(rep.neighbours, ex)
                    results.append(
                        (qid, rep.unique_candidates, ratio, rep.termination.value)
                    )
                _collect(
                    results, "vote", f"m{m}.L{L}.eps{eps:g}", fold, rows_out, log_lines
                )

        if config.include_lsh:
            H, T = config.lsh_hashes, config.lsh_tables
            if config.lsh_w == "auto":
                w_grid = suggest_w_grid(
                    fold_data, H, seed=derive_seed(config.master_seed, 3, fold)
                )
            else:
                w_grid = config.lsh_w
            for wi, w in enumerate(w_grid):
                lsh = LshIndex(
                    fold_data, H, T, w, derive_seed(config.master_seed, 2, fold, wi)
                )
                results = []
                for (qid, qc), ex in zip(queries, exact):
                    pairs, cand = lsh.query(qc, k)
                    if len(pairs) < k:
                        results.append((qid, cand, None, None))
                    else:
                        results.append((qid, cand, approximation_ratio(pairs, ex), None))
                _collect(
                    results, "lsh", f"H{H}.T{T}.w{w:.6g}", fold, rows_out, log_lines
                )

    with open(config.out_csv, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in rows_out:
            fh.write(
                f"{r.method},{r.param_label},{r.fold},"
                f"{repr(r.mean_candidates)},{repr(r.std_candidates)},"
                f"{repr(r.mean_ratio)},{repr(r.std_ratio)},"
                f"{r.failures},{r.inf_ratios}\n"
            )
    if config.out_log:
        with open(config.out_log, "w") as fh:
            for line in log_lines:
                fh.write(line + "\n")
    return rows_out


def aggregate_curves(rows):
    """CurvePoints per (method, param): fold means averaged, ratio std across
    folds. Folds whose every query failed (nan means) are dropped; cells
    with no surviving fold are skipped."""
    groups = {}
    order = []
    for r in rows:
        key = (r.method, r.param_label)
        if key not in groups:
            groups[key] = []
            order.append(key)
        if math.isfinite(r.mean_candidates) and math.isfinite(r.mean_ratio):
            groups[key].append(r)
    points = []
    for key in order:
        cell = groups[key]
        if not cell:
            continue
        points.append(
            CurvePoint(
                label=f"{key[0]}[{key[1]}]",
                mean_candidates=float(np.mean([r.mean_candidates for r in cell])),
                mean_ratio=float(np.mean([r.mean_ratio for r in cell])),
                std_ratio=float(np.std([r.mean_ratio for r in cell])),
            )
        )
    return points


# -- dataset ingestion and synthesis ------------------------------------


def load_dataset(path, format="csv", has_ids=False):
    """Read a dataset file.

    csv: one point per line, comma-separated reals; with has_ids the first
    column is an id (int if it parses, else string). bin: per vector, a
    little-endian int32 dimension then that many little-endian float32
    values, widened to float64; ids are 0..n-1 in file order.
    """
    if format == "csv":
        return _load_csv(path, has_ids)
    if format in ("bin", "packed-binary"):
        return _load_bin(path)
    raise ValueError(f"unknown dataset format {format!r}")


def _load_csv(path, has_ids):
    ids = []
    rows = []
    dim = None
    with open(path) as fh:
        for ln, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            if has_ids:
                if len(parts) < 2:
                    raise ValueError(f"{path}:{ln}: id column but no coordinates")
                rid = parts[0].strip()
                try:
                    rid = int(rid)
                except ValueError:
                    pass
                ids.append(rid)
                parts = parts[1:]
            try:
                vec = [float(v) for v in parts]
            except ValueError as exc:
                raise ValueError(f"{path}:{ln}: {exc}") from None
            if dim is None:
                dim = len(vec)
            elif len(vec) != dim:
                raise ValueError(
                    f"{path}:{ln}: dimension {len(vec)} differs from first line's {dim}"
                )
            if not all(math.isfinite(v) for v in vec):
                raise ValueError(f"{path}:{ln}: non-finite value")
            rows.append(vec)
    if not rows:
        raise ValueError(f"{path}: empty dataset")
    coords = np.asarray(rows, dtype=np.float64)
    return Dataset(ids if has_ids else list(range(len(rows))), coords)


def _load_bin(path):
    with open(path, "rb") as fh:
        blob = fh.read()
    vecs = []
    off = 0
    dim = None
    while off < len(blob):
        if off + 4 > len(blob):
            raise ValueError(f"{path}: truncated record header at byte {off}")
        d = int.from_bytes(blob[off : off + 4], "little", signed=True)
        if d < 1:
            raise ValueError(f"{path}: invalid dimension {d} at byte {off}")
        if dim is None:
            dim = d
        elif d != dim:
            raise ValueError(
                f"{path}: record {len(vecs)} has dimension {d}, expected {dim}"
            )
        need = 4 + 4 * d
        if off + need > len(blob):
            raise ValueError(f"{path}: truncated record {len(vecs)} at byte {off}")
        vec = np.frombuffer(blob, dtype="<f4", count=d, offset=off + 4)
        if not np.isfinite(vec).all():
            raise ValueError(f"{path}: non-finite value in record {len(vecs)}")
        vecs.append(vec.astype(np.float64))
        off += need
    if not vecs:
        raise ValueError(f"{path}: empty dataset")
    return Dataset(list(range(len(vecs))), np.stack(vecs))


def save_dataset(data, path, format="csv", include_ids=False):
    """Write a Dataset in a form load_dataset reads back.

    csv uses repr floats (exact float64 round trip); bin stores float32 per
    the format definition, so it is lossy for float64 data.
    """
    data = Dataset.coerce(data)
    if format == "csv":
        with open(path, "w") as fh:
            for i in range(len(data)):
                cells = [repr(float(v)) for v in data.coords[i]]
                if include_ids:
                    cells.insert(0, str(data.ids[i]))
                fh.write(",".join(cells) + "\n")
    elif format in ("bin", "packed-binary"):
        d = data.dim
        with open(path, "wb") as fh:
            head = d.to_bytes(4, "little")
            for i in range(len(data)):
                fh.write(head)
                fh.write(data.coords[i].astype("<f4").tobytes())
    else:
        raise ValueError(f"unknown dataset format {format!r}")


def synth_dataset(kind, n, d, seed, clusters=10, spread=1.0, separation=10.0):
    """Deterministic synthetic datasets, ids 0..n-1.

    uniform-cube: i.i.d. uniform in [0, 1)^d.
    gaussian-mixture: `clusters` standard-normal centers, then cluster
      labels, then per-point noise at scale `spread` (draws in that order).
    two-scale-clusters: two clusters `separation` apart, each with spread
      separation/100 — tight blobs with a far gap, for large doubling ratios.
    """
    if n < 1 or d < 1:
        raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    if kind == "uniform-cube":
        coords = rng.random((n, d))
    elif kind == "gaussian-mixture":
        if clusters < 1:
            raise ValueError(f"clusters must be >= 1, got {clusters}")
        if spread < 0:
            raise ValueError(f"spread must be >= 0, got {spread}")
        centers = rng.standard_normal((clusters, d))
        labels = rng.integers(0, clusters, size=n)
        coords = centers[labels] + spread * rng.standard_normal((n, d))
    elif kind == "two-scale-clusters":
        if separation <= 0:
            raise ValueError(f"separation must be positive, got {separation}")
        offset = np.full(d, separation / math.sqrt(d))
        centers = np.stack([np.zeros(d), offset])
        labels = rng.integers(0, 2, size=n)
        coords = centers[labels] + (separation / 100.0) * rng.standard_normal((n, d))
    else:
        raise ValueError(f"unknown synthetic kind {kind!r}")
    return Dataset(list(range(n)), coords)
