"""Ordered multimap over (key, id) pairs, backed by a skip list.

Entries are totally ordered by (key, id); expected O(log n) insert, remove
and seek, with a doubly linked base level so callers can walk entries in
both directions from any seek position.
"""

import random

_MAX_LEVEL = 24
_P = 0.5


class Node:
    """One entry. Owned by the list; callers must treat it as read-only.

    `val` is an opaque payload that never participates in ordering.
    """

    __slots__ = ("key", "id", "val", "nxt", "prev")

    def __init__(self, key, id, val, level):
        self.key = key
        self.id = id
        self.val = val
        self.nxt = [None] * level
        self.prev = None

    def __repr__(self):
        return f"Node({self.key!r}, {self.id!r})"


class SkipList:
    """Skip list keyed by (key, id) with bidirectional base-level links.

    Parameters
    ----------
    seed : int
        Seeds the level generator. Levels only affect walk lengths, never
        entry order, so any seed gives identical iteration output.
    """

    def __init__(self, seed=0):
        self._head = Node(None, None, None, _MAX_LEVEL)
        self._level = 1
        self._len = 0
        self._rng = random.Random(seed)

    def __len__(self):
        return self._len

    def __iter__(self):
        """Yield (key, id) pairs in (key, id) order."""
        node = self._head.nxt[0]
        while node is not None:
            yield node.key, node.id
            node = node.nxt[0]

    def _random_level(self):
        level = 1
        while level < _MAX_LEVEL and self._rng.random() < _P:
            level += 1
        return level

    def insert(self, key, id, val=None):
        """Insert one entry. Raises ValueError if (key, id) already present."""
        update = [None] * _MAX_LEVEL
        node = self._head
        for lvl in range(self._level - 1, -1, -1):
            nxt = node.nxt[lvl]
            while nxt is not None and (nxt.key < key or (nxt.key == key and nxt.id < id)):
                node = nxt
                nxt = node.nxt[lvl]
            update[lvl] = node
        succ = node.nxt[0]
        if succ is not None and succ.key == key and succ.id == id:
            raise ValueError(f"duplicate entry ({key!r}, {id!r})")
        level = self._random_level()
        if level > self._level:
            for lvl in range(self._level, level):
                update[lvl] = self._head
            self._level = level
        new = Node(key, id, val, level)
        for lvl in range(level):
            new.nxt[lvl] = update[lvl].nxt[lvl]
            update[lvl].nxt[lvl] = new
        new.prev = None if update[0] is self._head else update[0]
        if succ is not None:
            succ.prev = new
        self._len += 1
        return new

    def remove(self, key, id):
        """Remove the entry (key, id). Raises KeyError if absent."""
        update = [None] * _MAX_LEVEL
        node = self._head
        for lvl in range(self._level - 1, -1, -1):
            nxt = node.nxt[lvl]
            while nxt is not None and (nxt.key < key or (nxt.key == key and nxt.id < id)):
                node = nxt
                nxt = node.nxt[lvl]
            update[lvl] = node
        target = node.nxt[0]
        if target is None or target.key != key or target.id != id:
            raise KeyError(f"no entry ({key!r}, {id!r})")
        for lvl in range(len(target.nxt)):
            update[lvl].nxt[lvl] = target.nxt[lvl]
        succ = target.nxt[0]
        if succ is not None:
            succ.prev = target.prev
        while self._level > 1 and self._head.nxt[self._level - 1] is None:
            self._level -= 1
        self._len -= 1
        return target

    def straddle(self, key):
        """Seek around `key`, comparing keys only (ids ignored).

        Returns (below, at_or_above): the last node with node.key < key and
        the first node with node.key >= key. Either may be None.
        """
        node = self._head
        for lvl in range(self._level - 1, -1, -1):
            nxt = node.nxt[lvl]
            while nxt is not None and nxt.key < key:
                node = nxt
                nxt = node.nxt[lvl]
        below = None if node is self._head else node
        return below, node.nxt[0]
