"""Command-line front end: build, query, bench, sparsity, synth.

Diagnostics (including the effective seed of every run) go to standard
error; data goes to standard output or the --out path. Exit code 0 iff the
operation completed.
"""

import argparse
import json
import sys

from .analysis import estimate_global_sparsity
from .bench import BenchConfig, load_dataset, run_bench, save_dataset, synth_dataset
from .index import VoteIndex
from .query import Adaptive, FixedIterations, QueryParams, query


def _cmd_build(args):
    data = load_dataset(args.data, args.format)
    index = VoteIndex.construct(data, args.m, args.L, args.seed)
    index.save(args.out)
    print(f"seed={args.seed}", file=sys.stderr)
    print(
        f"n={len(index)} d={index.dim or 0} m={index.m} L={index.L} out={args.out}",
        file=sys.stderr,
    )
    return 0


def _parse_vector(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise ValueError(f"bad query vector {text!r}: {exc}") from None


def _cmd_query(args):
    index = VoteIndex.load(args.index)
    print(f"seed={index.seed}", file=sys.stderr)
    if args.q is not None:
        vectors = [_parse_vector(args.q)]
    else:
        vectors = []
        with open(args.q_file) as fh:
            for raw in fh:
                line = raw.strip()
                if line:
                    vectors.append(_parse_vector(line))
        if not vectors:
            raise ValueError(f"{args.q_file}: no query vectors")
    if args.k_tilde is not None:
        mode = FixedIterations(args.k_tilde)
    else:
        mode = Adaptive(args.epsilon)
    params = QueryParams(args.k, mode)
    for vec in vectors:
        report = query(index, vec, params)
        print(
            json.dumps(
                {
                    "neighbours": [
                        {"id": pid, "dist": dist} for pid, dist in report.neighbours
                    ],
                    "candidates": report.unique_candidates,
                    "iterations": report.outer_iterations,
                    "termination": report.termination.value,
                }
            )
        )
    return 0


_LIST_KEYS = {"vote_k_tilde": int, "vote_epsilon": float, "lsh_w": float}

_FIELD_TYPES = {
    "data": str,
    "format": str,
    "has_ids": bool,
    "k": int,
    "folds": int,
    "queries_per_fold": int,
    "master_seed": int,
    "include_exhaustive": bool,
    "include_vote": bool,
    "include_lsh": bool,
    "vote_m": int,
    "vote_l": int,
    "vote_k_tilde": tuple,
    "vote_epsilon": tuple,
    "lsh_hashes": int,
    "lsh_tables": int,
    "lsh_w": tuple,
    "out_csv": str,
    "out_log": str,
}


def _coerce_config_value(key, value):
    if key in _LIST_KEYS:
        if value == "auto" and key != "vote_epsilon":
            return "auto"
        elem = _LIST_KEYS[key]
        return tuple(elem(v) for v in value.split(","))
    target = _FIELD_TYPES[key]
    if target is bool:
        if value.lower() in ("true", "1", "yes"):
            return True
        if value.lower() in ("false", "0", "no"):
            return False
        raise ValueError(f"expected true/false, got {value!r}")
    if target is int:
        return int(value)
    return value


def parse_bench_config(path):
    """Parse a flat key=value file (# comments allowed) into a BenchConfig."""
    values = {}
    with open(path) as fh:
        for ln, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if not sep or not key:
                raise ValueError(f"{path}:{ln}: expected key=value")
            if key not in _FIELD_TYPES:
                raise ValueError(f"{path}:{ln}: unknown key {key!r}")
            try:
                values[key] = _coerce_config_value(key, value)
            except ValueError as exc:
                raise ValueError(f"{path}:{ln}: {exc}") from None
    if "data" not in values:
        raise ValueError(f"{path}: missing required key 'data'")
    return BenchConfig(**values)


def _cmd_bench(args):
    config = parse_bench_config(args.config)
    print(f"seed={config.master_seed}", file=sys.stderr)
    rows = run_bench(config)
    print(
        f"rows={len(rows)} csv={config.out_csv} log={config.out_log}",
        file=sys.stderr,
    )
    return 0


def _cmd_sparsity(args):
    data = load_dataset(args.data, "csv")
    profile = estimate_global_sparsity(data, args.tau)
    print("seed=none", file=sys.stderr)
    idim = profile.intrinsic_dim
    print(
        json.dumps(
            {
                "tau": profile.tau,
                "gamma": profile.gamma,
                "intrinsic_dim": idim if idim != float("inf") else None,
            }
        )
    )
    return 0


def _cmd_synth(args):
    data = synth_dataset(
        args.kind,
        args.n,
        args.d,
        args.seed,
        clusters=args.clusters,
        spread=args.spread,
        separation=args.separation,
    )
    save_dataset(data, args.out, args.format)
    print(f"seed={args.seed}", file=sys.stderr)
    print(f"n={args.n} d={args.d} kind={args.kind} out={args.out}", file=sys.stderr)
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="projknn",
        description="Random-projection k-NN index with vote-based candidates",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build an index snapshot from a dataset file")
    p.add_argument("--data", required=True, help="dataset file path")
    p.add_argument("--format", choices=("csv", "bin"), default="csv")
    p.add_argument("--m", type=int, required=True, help="simple indices per composite")
    p.add_argument("--L", type=int, required=True, help="number of composites")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="snapshot output path")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("query", help="query an index snapshot")
    p.add_argument("--index", required=True, help="snapshot path")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--q", help='query vector as "v1,v2,..."')
    src.add_argument("--q-file", help="file with one query vector per line")
    p.add_argument("--k", type=int, required=True)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--k-tilde", type=int, help="fixed outer-iteration budget")
    mode.add_argument("--epsilon", type=float, help="adaptive miss-probability bound")
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("bench", help="run the benchmark harness")
    p.add_argument("--config", required=True, help="flat key=value config file")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("sparsity", help="doubling-ratio diagnostic of a csv dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--tau", type=int, required=True)
    p.set_defaults(func=_cmd_sparsity)

    p = sub.add_parser("synth", help="write a synthetic dataset")
    p.add_argument(
        "--kind",
        required=True,
        choices=("uniform-cube", "gaussian-mixture", "two-scale-clusters"),
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "bin"), default="csv")
    p.add_argument("--clusters", type=int, default=10)
    p.add_argument("--spread", type=float, default=1.0)
    p.add_argument("--separation", type=float, default=10.0)
    p.set_defaults(func=_cmd_synth)

    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
