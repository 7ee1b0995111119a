"""VoteIndex construction, cursors, dynamic updates, and snapshots."""

import struct

import numpy as np
import pytest
from hypothesis import given, strategies as st

from projknn.data import Dataset, Point
from projknn.index import SNAPSHOT_MAGIC, SimpleIndex, VoteIndex


def expected_directions(seed, L, m, d):
    """The documented recipe: one standard_normal((L, m, d)) draw from
    default_rng(seed), rows normalized to unit length."""
    raw = np.random.default_rng(seed).standard_normal((L, m, d))
    return raw / np.linalg.norm(raw, axis=2, keepdims=True)


# -- simple index cursor ---------------------------------------------------


def simple_with(entries, direction=None, seed=0):
    d = direction if direction is not None else np.array([1.0])
    si = SimpleIndex(d, seed=seed)
    for key, pid in entries:
        si.insert(key, pid, val=pid)
    return si


def cursor_ids_keys(si, q_key):
    return [(node.key, node.id) for node in si._node_cursor(q_key)]


def test_cursor_orders_by_absolute_difference():
    si = simple_with([(1.0, 10), (2.0, 11), (4.0, 12)])
    # |2.0-2.2|=0.2  |1.0-2.2|=1.2  |4.0-2.2|=1.8
    assert cursor_ids_keys(si, 2.2) == [(2.0, 11), (1.0, 10), (4.0, 12)]


def test_cursor_tie_takes_smaller_key_first():
    si = simple_with([(-1.0, 5), (1.0, 6)])
    assert cursor_ids_keys(si, 0.0) == [(-1.0, 5), (1.0, 6)]


def test_cursor_equal_keys_ascend_by_id():
    si = simple_with([(3.0, 9), (3.0, 2), (3.0, 5), (0.0, 1)])
    assert cursor_ids_keys(si, 3.0) == [(3.0, 2), (3.0, 5), (3.0, 9), (0.0, 1)]


def test_cursor_equal_keys_below_query_also_ascend_by_id():
    si = simple_with([(3.0, 9), (3.0, 2), (10.0, 1)])
    # |10-7| = 3 < |3-7| = 4; the below-side equal-key run still ascends by id
    assert cursor_ids_keys(si, 7.0) == [(10.0, 1), (3.0, 2), (3.0, 9)]


def test_cursor_on_empty_index():
    si = simple_with([])
    assert cursor_ids_keys(si, 0.0) == []


@given(
    st.lists(
        st.tuples(st.integers(-40, 40), st.integers(0, 25)),
        min_size=1,
        max_size=60,
        unique=True,
    ),
    st.floats(-50, 50, allow_nan=False),
)
def test_cursor_is_a_permutation_in_nondecreasing_distance(pairs, q_key):
    entries = [(float(k), i) for k, i in pairs]
    si = simple_with(entries)
    seen = cursor_ids_keys(si, q_key)
    assert sorted(seen) == sorted(entries)  # every entry exactly once
    diffs = [abs(k - q_key) for k, _ in seen]
    assert all(a <= b + 1e-12 for a, b in zip(diffs, diffs[1:]))
    for (k1, i1), (k2, i2) in zip(seen, seen[1:]):
        if abs(k1 - q_key) == abs(k2 - q_key):
            assert (k1, i1) < (k2, i2)  # tie rule: smaller key, then smaller id


def test_simple_index_rejects_non_unit_direction():
    with pytest.raises(ValueError):
        SimpleIndex(np.array([1.0, 1.0]), seed=0)


# -- vote index construction ----------------------------------------------


def test_directions_follow_documented_recipe():
    pts = np.random.default_rng(8).standard_normal((3, 2))
    idx = VoteIndex.construct(pts, m=2, L=1, seed=42)
    want = expected_directions(42, 1, 2, 2)
    got = idx._dirs_flat.reshape(1, 2, 2)
    np.testing.assert_allclose(got, want, rtol=0, atol=0)
    norms = np.linalg.norm(idx._dirs_flat, axis=1)
    np.testing.assert_allclose(norms, 1.0, atol=1e-9)


def test_simple_index_keys_are_projections():
    pts = np.random.default_rng(9).standard_normal((5, 3))
    idx = VoteIndex.construct(pts, m=2, L=2, seed=1)
    # keys come from one (m*L, d) @ (d,) matvec per point; reproduce with the
    # same operation so the comparison is bitwise, not approximate
    dirs = expected_directions(1, 2, 2, 3).reshape(4, 3)
    keys = np.array([dirs @ pts[i] for i in range(5)])
    for j, si in enumerate(idx._simple):
        got = sorted(si.entries())
        want = sorted((float(keys[i, j]), i) for i in range(5))
        assert got == want


def test_construct_validations():
    with pytest.raises(ValueError):
        VoteIndex(m=0, L=1, seed=0)
    with pytest.raises(ValueError):
        VoteIndex(m=1, L=0, seed=0)
    with pytest.raises(ValueError):
        VoteIndex(m=1, L=1, seed=-1)
    with pytest.raises(ValueError):
        VoteIndex(m=1, L=1, seed=2**64)
    with pytest.raises(ValueError):
        VoteIndex(m=1.5, L=1, seed=0)


def test_len_dim_and_contains():
    pts = np.arange(8.0).reshape(4, 2)
    idx = VoteIndex.construct(pts, m=2, L=2, seed=3)
    assert len(idx) == 4
    assert idx.dim == 2
    assert 2 in idx and 7 not in idx


def test_duplicate_id_insert_rejected():
    idx = VoteIndex.construct(np.ones((2, 2)) * [[1.0], [2.0]], m=1, L=1, seed=0)
    with pytest.raises(ValueError):
        idx.insert(Point(1, [9.0, 9.0]))


def test_dimension_mismatch_on_insert():
    idx = VoteIndex.construct(np.zeros((1, 3)), m=1, L=1, seed=0)
    with pytest.raises(ValueError):
        idx.insert(Point(5, [1.0, 2.0]))


# -- dynamic updates -------------------------------------------------------


def entries_snapshot(idx):
    return [sorted(si.entries()) for si in idx._simple]


def test_construct_equals_construct_then_insert():
    rng = np.random.default_rng(21)
    pts = rng.standard_normal((30, 6))
    whole = VoteIndex.construct(pts, m=3, L=2, seed=77)
    partial = VoteIndex.construct(pts[:20], m=3, L=2, seed=77)
    for i in range(20, 30):
        partial.insert(Point(i, pts[i]))
    assert entries_snapshot(whole) == entries_snapshot(partial)


def test_delete_restores_prior_entries():
    rng = np.random.default_rng(22)
    pts = rng.standard_normal((25, 4))
    base = VoteIndex.construct(pts[:20], m=2, L=3, seed=5)
    before = entries_snapshot(base)
    for i in range(20, 25):
        base.insert(Point(i, pts[i]))
    for i in range(20, 25):
        base.delete(i)
    assert entries_snapshot(base) == before
    assert len(base) == 20


def test_delete_missing_id_raises():
    idx = VoteIndex.construct(np.zeros((2, 2)) + [[0.0], [1.0]], m=1, L=1, seed=0)
    with pytest.raises(KeyError):
        idx.delete(99)


def test_row_reuse_after_delete_keeps_coords_straight():
    pts = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
    idx = VoteIndex.construct(pts, m=2, L=2, seed=11)
    idx.delete(1)
    idx.insert(Point(7, [5.0, 5.0]))  # reuses the freed storage row
    assert sorted(idx.ids()) == [0, 2, 7]
    got = {p.id: tuple(p.coords) for p in idx.points()}
    assert got[7] == (5.0, 5.0) and got[0] == (0.0, 0.0) and got[2] == (2.0, 2.0)


def test_empty_construct_then_insert_matches_bulk():
    pts = np.random.default_rng(30).standard_normal((6, 3))
    inc = VoteIndex(m=2, L=2, seed=9)
    assert len(inc) == 0 and inc.dim is None
    for i, row in enumerate(pts):
        inc.insert(Point(i, row))
    bulk = VoteIndex.construct(pts, m=2, L=2, seed=9)
    assert entries_snapshot(inc) == entries_snapshot(bulk)


# -- snapshots -------------------------------------------------------------


def test_snapshot_round_trip(tmp_path):
    pts = np.random.default_rng(14).standard_normal((12, 5))
    idx = VoteIndex.construct(pts, m=2, L=2, seed=13)
    path = tmp_path / "idx.bin"
    idx.save(path)
    back = VoteIndex.load(path)
    assert back.m == 2 and back.L == 2 and back.seed == 13
    assert entries_snapshot(back) == entries_snapshot(idx)
    assert sorted(back.ids()) == sorted(idx.ids())


def test_snapshot_header_layout(tmp_path):
    pts = np.array([[1.5, -2.0]])
    idx = VoteIndex.construct(pts, m=3, L=2, seed=99)
    path = tmp_path / "idx.bin"
    idx.save(path)
    blob = path.read_bytes()
    assert blob[:4] == SNAPSHOT_MAGIC == b"DCI1"
    d, n, m, L, seed = struct.unpack_from("<5Q", blob, 4)
    assert (d, n, m, L, seed) == (2, 1, 3, 2, 99)
    pid, x, y = struct.unpack_from("<qdd", blob, 4 + 40)
    assert pid == 0 and (x, y) == (1.5, -2.0)
    assert len(blob) == 4 + 40 + (8 + 16)


def test_snapshot_bad_magic(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"NOPE" + b"\x00" * 60)
    with pytest.raises(ValueError):
        VoteIndex.load(path)


def test_snapshot_truncated(tmp_path):
    pts = np.zeros((3, 2)) + [[0.0], [1.0], [2.0]]
    idx = VoteIndex.construct(pts, m=1, L=1, seed=0)
    path = tmp_path / "idx.bin"
    idx.save(path)
    clipped = tmp_path / "clipped.bin"
    clipped.write_bytes(path.read_bytes()[:-5])
    with pytest.raises(ValueError):
        VoteIndex.load(clipped)


def test_snapshot_empty_index(tmp_path):
    idx = VoteIndex(m=2, L=1, seed=4)
    path = tmp_path / "empty.bin"
    idx.save(path)
    back = VoteIndex.load(path)
    assert len(back) == 0 and back.m == 2 and back.L == 1 and back.seed == 4


def test_snapshot_requires_int64_ids(tmp_path):
    idx = VoteIndex(m=1, L=1, seed=0)
    idx.insert(Point("tag", [1.0]))
    with pytest.raises(ValueError):
        idx.save(tmp_path / "x.bin")
