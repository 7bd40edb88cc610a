"""Sorted integer set over a skip list whose bottom nodes hold up to k keys.

Batching k keys per node keeps neighbors on the same cache line (the
point of the design) and cuts the node count by ~k. The default capacity
is 32; capacity 1 degenerates to a classic one-key-per-node skip list and
serves as the comparison baseline.

Concurrency protocol
--------------------
Every bottom node carries an immutable ``anchor`` (its minimum key at
creation) and covers the key range [anchor, next.anchor). Mutations lock
only the covering node (plus its predecessor, in key order, when an
emptied node is unlinked); the key array is an immutable tuple replaced
in one store, so readers always see a consistent snapshot and ``contains``
never blocks. A split publishes the new right node before shrinking the
left keys, so a key is visible in at least one node at every instant.
Index towers are rebuilt best-effort under a single index lock after the
bottom-level change commits; correctness never depends on the index,
every key stays reachable by walking the bottom level.
"""

from __future__ import annotations

import random
import threading
from typing import Iterator, Optional

MAX_HEIGHT = 32


class _Node:
    __slots__ = ("anchor", "keys", "lock", "next", "forward", "unlinked")

    def __init__(self, anchor, keys: tuple, height: int) -> None:
        self.anchor = anchor
        self.keys = keys
        self.lock = threading.Lock()
        self.next: Optional[_Node] = None
        self.forward: list[Optional[_Node]] = [None] * height
        self.unlinked = False


class FatNodeSkipListSet:
    """Concurrent sorted set of machine integers with k keys per node."""

    def __init__(self, capacity: int = 32, seed: int | None = None) -> None:
        if capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._head = _Node(float("-inf"), (), MAX_HEIGHT)
        self._rng = random.Random(seed)
        self._index_lock = threading.Lock()

    # -- search ---------------------------------------------------------

    def _find_node(self, key: int) -> _Node:
        """Rightmost node whose anchor is <= key (the covering node)."""
        cur = self._head
        for lvl in range(MAX_HEIGHT - 1, -1, -1):
            nxt = cur.forward[lvl]
            while nxt is not None and nxt.anchor <= key:
                cur = nxt
                nxt = cur.forward[lvl]
        nxt = cur.next
        while nxt is not None and nxt.anchor <= key:
            cur = nxt
            nxt = cur.next
        return cur

    def contains(self, key: int) -> bool:
        node = self._find_node(key)
        while True:
            keys = node.keys
            nxt = node.next
            if nxt is not None and nxt.anchor <= key:
                node = nxt  # a split moved coverage right after we landed
                continue
            return key in keys

    __contains__ = contains

    # -- mutation -------------------------------------------------------

    def _valid_for(self, node: _Node, key: int) -> bool:
        nxt = node.next
        return not node.unlinked and node.anchor <= key and (nxt is None or key < nxt.anchor)

    def insert(self, key: int) -> bool:
        """Add ``key``; True iff it was absent."""
        while True:
            node = self._find_node(key)
            with node.lock:
                if not self._valid_for(node, key):
                    continue
                keys = node.keys
                if key in keys:
                    return False
                if len(keys) < self.capacity:
                    node.keys = self._insort(keys, key)
                    return True
                # full node: split at the median, then the key lands in
                # its half (left gets ceil(k/2) keys, right the rest)
                combined = self._insort(keys, key)
                mid = (self.capacity + 1) // 2
                left, right = combined[:mid], combined[mid:]
                new = _Node(right[0], right, self._random_height())
                new.next = node.next
                node.next = new  # publish before shrinking: no key vanishes
                node.keys = left
            self._index_insert(new)
            return True

    def remove(self, key: int) -> bool:
        """Discard ``key``; True iff it was present."""
        while True:
            node = self._find_node(key)
            with node.lock:
                if not self._valid_for(node, key):
                    continue
                keys = node.keys
                if key not in keys:
                    return False
                if len(keys) > 1 or node is self._head:
                    node.keys = tuple(k for k in keys if k != key)
                    return True
            # removing the last key empties the node: relock predecessor
            # first (key order), revalidate, then unlink under both locks
            if self._remove_and_unlink(node, key):
                return True

    def _remove_and_unlink(self, node: _Node, key: int) -> bool:
        pred = self._find_pred(node)
        if pred is None:
            return False  # list changed; caller retries
        with pred.lock:
            if pred.unlinked or pred.next is not node:
                return False
            with node.lock:
                keys = node.keys
                if key not in keys:
                    return False  # lost a race; caller re-finds and reports
                if len(keys) > 1:
                    node.keys = tuple(k for k in keys if k != key)
                    return True
                node.keys = ()
                node.unlinked = True
                pred.next = node.next
        self._index_remove(node)
        return True

    def _find_pred(self, node: _Node) -> Optional[_Node]:
        cur = self._head
        while True:
            nxt = cur.next
            if nxt is None:
                return None
            if nxt is node:
                return cur
            if nxt.anchor > node.anchor:
                return None
            cur = nxt

    @staticmethod
    def _insort(keys: tuple, key: int) -> tuple:
        out = []
        placed = False
        for k in keys:
            if not placed and key < k:
                out.append(key)
                placed = True
            out.append(k)
        if not placed:
            out.append(key)
        return tuple(out)

    # -- index maintenance (best effort, never load-bearing) -------------

    def _random_height(self) -> int:
        h = 0
        while h < MAX_HEIGHT and self._rng.getrandbits(1):
            h += 1
        return h

    def _index_insert(self, node: _Node) -> None:
        if not node.forward:
            return
        with self._index_lock:
            if node.unlinked:
                return
            cur = self._head
            for lvl in range(MAX_HEIGHT - 1, -1, -1):
                nxt = cur.forward[lvl]
                while nxt is not None and nxt.anchor < node.anchor:
                    cur = nxt
                    nxt = cur.forward[lvl]
                if lvl < len(node.forward) and nxt is not node:
                    node.forward[lvl] = nxt
                    cur.forward[lvl] = node

    def _index_remove(self, node: _Node) -> None:
        if not node.forward:
            return
        with self._index_lock:
            for lvl in range(len(node.forward) - 1, -1, -1):
                cur = self._head
                nxt = cur.forward[lvl]
                while nxt is not None and nxt is not node and nxt.anchor <= node.anchor:
                    cur = nxt
                    nxt = cur.forward[lvl]
                if nxt is node:
                    cur.forward[lvl] = node.forward[lvl]

    # -- whole-structure views (require external quiescence) -------------

    def __iter__(self) -> Iterator[int]:
        node: Optional[_Node] = self._head
        while node is not None:
            yield from node.keys
            node = node.next

    def __len__(self) -> int:
        return sum(len(node.keys) for node in self._nodes())

    def _nodes(self) -> Iterator[_Node]:
        node: Optional[_Node] = self._head
        while node is not None:
            yield node
            node = node.next

    def check_structure(self) -> dict:
        """Audit ordering, occupancy, and index reachability; returns stats.

        Only meaningful at quiescence. Raises AssertionError on violation.
        """
        keys_seen: list[int] = []
        occupancies: list[int] = []
        prev_anchor = None
        bottom = set()
        for node in self._nodes():
            assert not node.unlinked, "unlinked node still reachable"
            if node is not self._head:
                assert 1 <= len(node.keys) <= self.capacity, (
                    f"occupancy {len(node.keys)} outside [1, {self.capacity}]"
                )
                assert node.keys[0] >= node.anchor, "key below node anchor"
                assert prev_anchor is None or node.anchor > prev_anchor, "anchors not increasing"
                prev_anchor = node.anchor
                occupancies.append(len(node.keys))
            bottom.add(id(node))
            keys_seen.extend(node.keys)
        assert keys_seen == sorted(set(keys_seen)), "bottom level not strictly increasing"
        for lvl in range(MAX_HEIGHT):
            cur = self._head.forward[lvl]
            while cur is not None:
                assert id(cur) in bottom, f"index level {lvl} points at an unlinked node"
                cur = cur.forward[lvl] if lvl < len(cur.forward) else None
        return {
            "size": len(keys_seen),
            "node_count": len(occupancies),
            "occupancies": occupancies,
            "head_keys": len(self._head.keys),
        }
