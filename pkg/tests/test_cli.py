"""CLI behaviour: pipelines, exit codes, stderr diagnostics, config parsing."""

import json
import subprocess
import sys

import numpy as np
import pytest

from projknn.bench import CSV_HEADER, save_dataset, synth_dataset
from projknn.cli import main, parse_bench_config
from projknn.index import VoteIndex
from projknn.query import Adaptive, FixedIterations, QueryParams, query


@pytest.fixture()
def corpus(tmp_path):
    data = synth_dataset("gaussian-mixture", 20, 3, seed=5, clusters=2, spread=0.4)
    path = tmp_path / "data.csv"
    save_dataset(data, path)
    return data, str(path)


def _build(tmp_path, data_path, capsys, m=2, l=2, seed=7):
    snap = str(tmp_path / "index.snap")
    rc = main(
        ["build", "--data", data_path, "--m", str(m), "--L", str(l),
         "--seed", str(seed), "--out", snap]
    )
    assert rc == 0
    return snap, capsys.readouterr()


def test_build_reports_shape_on_stderr(tmp_path, corpus, capsys):
    _, data_path = corpus
    snap, io = _build(tmp_path, data_path, capsys)
    assert io.out == ""
    assert "seed=7" in io.err
    assert f"n=20 d=3 m=2 L=2 out={snap}" in io.err


def test_rebuild_is_byte_identical(tmp_path, corpus, capsys):
    _, data_path = corpus
    snap_a, _ = _build(tmp_path, data_path, capsys)
    snap_b = str(tmp_path / "other.snap")
    main(["build", "--data", data_path, "--m", "2", "--L", "2",
          "--seed", "7", "--out", snap_b])
    capsys.readouterr()
    assert open(snap_a, "rb").read() == open(snap_b, "rb").read()


def test_query_matches_library(tmp_path, corpus, capsys):
    data, data_path = corpus
    snap, _ = _build(tmp_path, data_path, capsys)
    vec = data.coords[4] + 0.05
    rc = main(
        ["query", "--index", snap,
         "--q=" + ",".join(repr(float(v)) for v in vec),
         "--k", "3", "--k-tilde", "20"]
    )
    assert rc == 0
    io = capsys.readouterr()
    assert "seed=7" in io.err
    got = json.loads(io.out)
    index = VoteIndex.load(snap)
    want = query(index, vec, QueryParams(3, FixedIterations(20)))
    assert got["neighbours"] == [
        {"id": pid, "dist": dist} for pid, dist in want.neighbours
    ]
    assert got["candidates"] == want.unique_candidates
    assert got["iterations"] == want.outer_iterations
    assert got["termination"] == want.termination.value


def test_query_file_batch_and_adaptive(tmp_path, corpus, capsys):
    data, data_path = corpus
    snap, _ = _build(tmp_path, data_path, capsys)
    qfile = tmp_path / "queries.txt"
    rows = [data.coords[i] * 1.01 for i in (0, 7, 13)]
    qfile.write_text(
        "\n".join(",".join(repr(float(v)) for v in row) for row in rows) + "\n\n"
    )
    rc = main(
        ["query", "--index", snap, "--q-file", str(qfile),
         "--k", "2", "--epsilon", "0.2"]
    )
    assert rc == 0
    out_lines = capsys.readouterr().out.splitlines()
    assert len(out_lines) == 3
    index = VoteIndex.load(snap)
    for line, row in zip(out_lines, rows):
        got = json.loads(line)
        want = query(index, row, QueryParams(2, Adaptive(0.2)))
        assert [n["id"] for n in got["neighbours"]] == [
            pid for pid, _ in want.neighbours
        ]
        assert got["termination"] in ("TestPassed", "DatasetExhausted")


def test_query_mode_flags_are_exclusive_and_required(tmp_path, corpus, capsys):
    _, data_path = corpus
    snap, _ = _build(tmp_path, data_path, capsys)
    base = ["query", "--index", snap, "--q", "0,0,0", "--k", "2"]
    with pytest.raises(SystemExit) as exc:
        main(base + ["--k-tilde", "5", "--epsilon", "0.1"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(base)
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["query", "--index", snap, "--k", "2", "--k-tilde", "5"])
    assert exc.value.code == 2  # neither --q nor --q-file
    capsys.readouterr()


def test_bad_vector_and_missing_files_exit_one(tmp_path, corpus, capsys):
    _, data_path = corpus
    snap, _ = _build(tmp_path, data_path, capsys)
    rc = main(["query", "--index", snap, "--q", "1.0,zap", "--k", "2",
               "--k-tilde", "5"])
    io = capsys.readouterr()
    assert rc == 1 and "error: bad query vector" in io.err
    rc = main(["query", "--index", str(tmp_path / "nope.snap"), "--q", "0,0,0",
               "--k", "2", "--k-tilde", "5"])
    io = capsys.readouterr()
    assert rc == 1 and "error:" in io.err
    rc = main(["build", "--data", str(tmp_path / "nope.csv"), "--m", "2",
               "--L", "2", "--seed", "1", "--out", str(tmp_path / "x.snap")])
    io = capsys.readouterr()
    assert rc == 1 and "error:" in io.err


def test_sparsity_json(tmp_path, capsys):
    # regular 3-simplex: every doubling observation is flat, gamma degenerates
    path = tmp_path / "simplex.csv"
    path.write_text(
        "1.0,0.0,0.0,0.0\n0.0,1.0,0.0,0.0\n0.0,0.0,1.0,0.0\n0.0,0.0,0.0,1.0\n"
    )
    rc = main(["sparsity", "--data", str(path), "--tau", "1"])
    assert rc == 0
    io = capsys.readouterr()
    assert "seed=none" in io.err
    got = json.loads(io.out)
    assert got == {"tau": 1, "gamma": 1.0, "intrinsic_dim": None}


def test_synth_is_deterministic_and_bin_loads(tmp_path, capsys):
    a, b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    for out in (a, b):
        rc = main(["synth", "--kind", "uniform-cube", "--n", "6", "--d", "2",
                   "--seed", "3", "--out", out])
        assert rc == 0
    io = capsys.readouterr()
    assert "seed=3" in io.err and "kind=uniform-cube" in io.err
    assert open(a).read() == open(b).read()
    binp = str(tmp_path / "a.bin")
    main(["synth", "--kind", "two-scale-clusters", "--n", "6", "--d", "2",
          "--seed", "3", "--out", binp, "--format", "bin"])
    capsys.readouterr()
    from projknn.bench import load_dataset

    assert len(load_dataset(binp, format="bin")) == 6


def test_bench_from_config_file(tmp_path, capsys):
    data = synth_dataset("gaussian-mixture", 40, 3, seed=11, clusters=2, spread=0.3)
    data_path = tmp_path / "bench_data.csv"
    save_dataset(data, data_path)
    out_csv = tmp_path / "bench.csv"
    out_log = tmp_path / "bench.jsonl"
    config = tmp_path / "bench.conf"
    config.write_text(
        "# two-cluster desk-scale run\n"
        f"data = {data_path}\n"
        "k = 2\n"
        "folds = 2\n"
        "queries_per_fold = 4\n"
        "master_seed = 99\n"
        "vote_m = 2\n"
        "vote_l = 2\n"
        "vote_k_tilde = 4,36\n"
        "vote_epsilon = 0.5\n"
        "lsh_hashes = 4\n"
        "lsh_tables = 3\n"
        "lsh_w = 2.0\n"
        f"out_csv = {out_csv}\n"
        f"out_log = {out_log}\n"
    )
    rc = main(["bench", "--config", str(config)])
    assert rc == 0
    io = capsys.readouterr()
    assert "seed=99" in io.err and f"csv={out_csv}" in io.err
    lines = out_csv.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + 2 * 5  # folds x (exhaustive + 2 kt + eps + lsh)
    cfg = parse_bench_config(str(config))
    assert cfg.vote_k_tilde == (4, 36) and cfg.vote_epsilon == (0.5,)
    assert cfg.lsh_w == (2.0,) and cfg.master_seed == 99


def test_bench_config_errors(tmp_path, capsys):
    bad = tmp_path / "bad.conf"
    bad.write_text("data = d.csv\nwidgets = 3\n")
    rc = main(["bench", "--config", str(bad)])
    io = capsys.readouterr()
    assert rc == 1 and ":2: unknown key 'widgets'" in io.err
    nokey = tmp_path / "nokey.conf"
    nokey.write_text("k = 2\n")
    rc = main(["bench", "--config", str(nokey)])
    io = capsys.readouterr()
    assert rc == 1 and "missing required key 'data'" in io.err
    noeq = tmp_path / "noeq.conf"
    noeq.write_text("data\n")
    rc = main(["bench", "--config", str(noeq)])
    io = capsys.readouterr()
    assert rc == 1 and ":1: expected key=value" in io.err
    badauto = tmp_path / "badauto.conf"
    badauto.write_text("data = d.csv\nvote_epsilon = auto\n")
    rc = main(["bench", "--config", str(badauto)])
    io = capsys.readouterr()
    assert rc == 1 and ":2:" in io.err


def test_usage_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["build", "--data", "x.csv"])  # missing required flags
    assert exc.value.code == 2
    capsys.readouterr()


def test_module_entry_point(tmp_path):
    out = tmp_path / "m.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "projknn", "synth", "--kind", "uniform-cube",
         "--n", "4", "--d", "2", "--seed", "1", "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "seed=1" in proc.stderr
    assert out.exists()
