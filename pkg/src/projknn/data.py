"""Points, datasets, and the shared Euclidean distance kernel.

Every distance in the package — query engine, brute-force oracle, LSH
ranking — goes through :func:`euclidean_distances`, so distances of equal
point sets are bitwise equal no matter which code path produced them.
"""

import numpy as np


def as_coords(values):
    """Validate and return a 1-D float64 coordinate vector."""
    coords = np.asarray(values, dtype=np.float64)
    if coords.ndim != 1:
        raise ValueError(f"coordinates must be a 1-D vector, got shape {coords.shape}")
    if coords.size == 0:
        raise ValueError("coordinates must have dimension >= 1")
    if not np.isfinite(coords).all():
        raise ValueError("coordinates must be finite (no NaN or infinity)")
    return coords


def euclidean_distances(coords, q):
    """Euclidean distances from each row of `coords` (n, d) to `q` (d,)."""
    diff = coords - q
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def euclidean(p, q):
    """Distance between two vectors, via the same kernel as the matrix form."""
    p = np.asarray(p, dtype=np.float64)
    return float(euclidean_distances(p.reshape(1, -1), q)[0])


class Point:
    """One indexed point: an opaque stable id plus a d-dimensional vector."""

    __slots__ = ("id", "coords")

    def __init__(self, id, coords):
        self.id = id
        self.coords = as_coords(coords)

    def __repr__(self):
        return f"Point({self.id!r}, {self.coords!r})"

    def __eq__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        return self.id == other.id and np.array_equal(self.coords, other.coords)

    def __hash__(self):
        return hash((self.id, self.coords.tobytes()))


class Dataset:
    """Id-addressed collection of d-dimensional vectors.

    `ids` is a list of unique, hashable, mutually comparable identifiers;
    `coords` is the matching (n, d) float64 matrix.
    """

    def __init__(self, ids, coords):
        coords = np.asarray(coords, dtype=np.float64)
        if coords.ndim != 2:
            raise ValueError(f"coords must be an (n, d) matrix, got shape {coords.shape}")
        if coords.shape[0] != len(ids):
            raise ValueError(f"{len(ids)} ids for {coords.shape[0]} coordinate rows")
        if coords.shape[0] > 0 and coords.shape[1] == 0:
            raise ValueError("points must have dimension >= 1")
        if not np.isfinite(coords).all():
            raise ValueError("coordinates must be finite (no NaN or infinity)")
        self.ids = list(ids)
        if len(set(self.ids)) != len(self.ids):
            seen = set()
            for i in self.ids:
                if i in seen:
                    raise ValueError(f"duplicate id {i!r}")
                seen.add(i)
        self.coords = coords
        self._ids_array = None

    @classmethod
    def from_array(cls, coords, ids=None):
        """Wrap an (n, d) array; ids default to 0..n-1."""
        coords = np.asarray(coords, dtype=np.float64)
        if ids is None:
            ids = list(range(coords.shape[0]))
        return cls(ids, coords)

    @classmethod
    def from_points(cls, points):
        points = list(points)
        if not points:
            return cls([], np.empty((0, 0)))
        dim = points[0].coords.size
        for p in points:
            if p.coords.size != dim:
                raise ValueError(
                    f"point {p.id!r} has dimension {p.coords.size}, expected {dim}"
                )
        return cls([p.id for p in points], np.stack([p.coords for p in points]))

    @classmethod
    def coerce(cls, obj):
        """Accept a Dataset, an (n, d) array, or an iterable of Points."""
        if isinstance(obj, cls):
            return obj
        if isinstance(obj, np.ndarray):
            return cls.from_array(obj)
        items = list(obj)
        if items and isinstance(items[0], Point):
            return cls.from_points(items)
        return cls.from_array(np.asarray(items, dtype=np.float64))

    @property
    def dim(self):
        return self.coords.shape[1]

    @property
    def ids_array(self):
        """ids as a numpy array (cached), for vectorized tie-breaking."""
        if self._ids_array is None:
            self._ids_array = np.asarray(self.ids)
        return self._ids_array

    def __len__(self):
        return self.coords.shape[0]

    def __iter__(self):
        for i, pid in enumerate(self.ids):
            yield Point(pid, self.coords[i])

    def point(self, id):
        try:
            row = self.ids.index(id)
        except ValueError:
            raise KeyError(id) from None
        return Point(id, self.coords[row])
