"""Projection-vote k-NN index: dataset store, directions, ordered simple indices.

A ``VoteIndex`` holds L groups ("composites") of m simple indices. Each simple
index pairs one random unit direction with an ordered multimap from projection
key to point id. Queries walk each simple index outward from the query's
projection and promote a point to candidate once all m members of a composite
have yielded it; the query engine lives in :mod:`projknn.query`.
"""

import struct

import numpy as np

from .data import Dataset, Point, as_coords
from .skiplist import SkipList

SNAPSHOT_MAGIC = b"DCI1"
_HEADER = struct.Struct("<5Q")
_MAX_SEED = 2**64


class SimpleIndex:
    """One unit projection direction plus entries ordered by (key, id)."""

    def __init__(self, direction, seed=0):
        direction = np.asarray(direction, dtype=np.float64)
        norm = float(np.linalg.norm(direction))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"direction norm {norm!r} is not 1 within 1e-9")
        self.direction = direction
        self._entries = SkipList(seed)

    def __len__(self):
        return len(self._entries)

    def entries(self):
        """Yield (key, id) pairs in (key, id) order."""
        return iter(self._entries)

    def insert(self, key, id, val=None):
        self._entries.insert(key, id, val)

    def remove(self, key, id):
        self._entries.remove(key, id)

    def _node_cursor(self, q_key):
        """Yield entry nodes in nondecreasing |key - q_key| order.

        Ties on |key - q_key| go to the smaller key, then the smaller id.
        Equal-key runs walked on the descending side are buffered and
        re-emitted in ascending id order so the id tie rule holds there too.
        """
        lo, hi = self._entries.straddle(q_key)
        run = ()
        ri = 0
        while True:
            if ri == len(run) and lo is not None:
                p = lo.prev
                if p is None or p.key != lo.key:
                    run = (lo,)
                else:
                    buf = [lo]
                    c = lo.key
                    while p is not None and p.key == c:
                        buf.append(p)
                        p = p.prev
                    buf.reverse()
                    run = buf
                ri = 0
                lo = p
            if ri < len(run):
                if hi is not None and hi.key - q_key < q_key - run[ri].key:
                    node = hi
                    hi = hi.nxt[0]
                else:
                    node = run[ri]
                    ri += 1
            elif hi is not None:
                node = hi
                hi = hi.nxt[0]
            else:
                return
            yield node

    def nearest_key_cursor(self, q_key):
        """Yield (key, id) pairs in nondecreasing |key - q_key| order.

        The cursor is exhausted when iteration stops (StopIteration is the
        end marker; ``next(cursor, None)`` gives a None sentinel instead).
        """
        for node in self._node_cursor(float(q_key)):
            yield node.key, node.id


class VoteIndex:
    """Dynamic k-NN index over L composites of m ordered projection indices.

    Directions are reproducible from the seed: a PCG64 generator
    (``numpy.random.default_rng(seed)``) draws ``standard_normal((L, m, d))``
    in one call and each row is normalized to unit length. Construction with
    no points defers direction sampling until the first insert fixes d.
    """

    def __init__(self, m, L, seed):
        if not isinstance(m, int) or m < 1:
            raise ValueError(f"m must be a positive integer, got {m!r}")
        if not isinstance(L, int) or L < 1:
            raise ValueError(f"L must be a positive integer, got {L!r}")
        if not isinstance(seed, int) or not (0 <= seed < _MAX_SEED):
            raise ValueError(f"seed must be an integer in [0, 2**64), got {seed!r}")
        self.m = m
        self.L = L
        self.seed = seed
        self.dim = None
        self._dirs_flat = None
        self._simple = []
        self._rows = {}      # id -> row
        self._row_ids = []   # row -> id (None when freed)
        self._coords = None  # (capacity, d) float64
        self._free = []

    @classmethod
    def construct(cls, points, m, L, seed):
        """Build an index over `points` (Dataset, (n, d) array, or Points)."""
        data = Dataset.coerce(points)
        index = cls(m, L, seed)
        for i, pid in enumerate(data.ids):
            index._insert_row(pid, data.coords[i])
        return index

    def __len__(self):
        return len(self._rows)

    @property
    def n(self):
        return len(self._rows)

    @property
    def simple_indices(self):
        """The L*m simple indices, row-major by (composite, member)."""
        return tuple(self._simple)

    def ids(self):
        return self._rows.keys()

    def __contains__(self, id):
        return id in self._rows

    def coords_of(self, id):
        return self._coords[self._rows[id]].copy()

    def points(self):
        """Yield the indexed points in internal row order (insertion order)."""
        for row, pid in enumerate(self._row_ids):
            if pid is not None:
                yield Point(pid, self._coords[row])

    def _materialize(self, d):
        self.dim = d
        rng = np.random.default_rng(self.seed)
        dirs = rng.standard_normal((self.L, self.m, d))
        dirs /= np.linalg.norm(dirs, axis=2, keepdims=True)
        self._dirs_flat = np.ascontiguousarray(dirs.reshape(self.L * self.m, d))
        self._simple = [
            SimpleIndex(self._dirs_flat[i], seed=(self.seed + i) % _MAX_SEED)
            for i in range(self.L * self.m)
        ]
        self._coords = np.empty((16, d), dtype=np.float64)

    def _project(self, coords):
        """Projection keys of one vector against all mL directions.

        Single code path for construct, insert, delete, and queries, so a
        given vector always produces bit-identical keys.
        """
        return self._dirs_flat @ coords

    def _insert_row(self, id, coords):
        if self.dim is None:
            self._materialize(coords.size)
        elif coords.size != self.dim:
            raise ValueError(
                f"point {id!r} has dimension {coords.size}, index has d={self.dim}"
            )
        if id in self._rows:
            raise ValueError(f"duplicate id {id!r}")
        if self._free:
            row = self._free.pop()
        else:
            row = len(self._row_ids)
            self._row_ids.append(None)
            if row >= self._coords.shape[0]:
                grown = np.empty((2 * self._coords.shape[0], self.dim))
                grown[: self._coords.shape[0]] = self._coords
                self._coords = grown
        self._coords[row] = coords
        keys = self._project(self._coords[row]).tolist()
        for si, key in zip(self._simple, keys):
            si.insert(key, id, row)
        self._rows[id] = row
        self._row_ids[row] = id

    def insert(self, point):
        """Insert one Point; its id must be new and its dimension must match."""
        self._insert_row(point.id, point.coords)

    def delete(self, id):
        """Remove the point with this id from the dataset and all simple indices."""
        if id not in self._rows:
            raise KeyError(f"unknown id {id!r}")
        row = self._rows[id]
        keys = self._project(self._coords[row]).tolist()
        for si, key in zip(self._simple, keys):
            si.remove(key, id)
        del self._rows[id]
        self._row_ids[row] = None
        self._free.append(row)

    # -- persistence ---------------------------------------------------

    def save(self, path):
        """Write the snapshot: magic, (d, n, m, L, seed) as little-endian
        64-bit integers, then per point a little-endian int64 id and d
        float64 coordinates. Simple indices are not serialized; they are
        rebuilt from the seed on load."""
        d = self.dim if self.dim is not None else 0
        with open(path, "wb") as fh:
            fh.write(SNAPSHOT_MAGIC)
            fh.write(_HEADER.pack(d, len(self._rows), self.m, self.L, self.seed))
            for point in self.points():
                if not isinstance(point.id, int):
                    raise ValueError(
                        f"snapshot requires integer ids, got {point.id!r}"
                    )
                fh.write(struct.pack("<q", point.id))
                fh.write(point.coords.astype("<f8").tobytes())

    @classmethod
    def load(cls, path):
        """Rebuild an index from a snapshot written by :meth:`save`."""
        with open(path, "rb") as fh:
            blob = fh.read()
        if blob[:4] != SNAPSHOT_MAGIC:
            raise ValueError(f"{path}: not an index snapshot (bad magic)")
        if len(blob) < 4 + _HEADER.size:
            raise ValueError(f"{path}: truncated snapshot header")
        d, n, m, L, seed = _HEADER.unpack_from(blob, 4)
        record = struct.Struct(f"<q{d}d")
        expected = 4 + _HEADER.size + n * record.size
        if len(blob) != expected:
            raise ValueError(
                f"{path}: truncated snapshot ({len(blob)} bytes, expected {expected})"
            )
        index = cls(m, L, seed)
        offset = 4 + _HEADER.size
        for _ in range(n):
            fields = record.unpack_from(blob, offset)
            offset += record.size
            index._insert_row(fields[0], as_coords(fields[1:]))
        return index
