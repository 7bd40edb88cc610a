"""Queue lock with local handover: each waiter blocks on its own node.

Acquire swaps the caller's node into the shared tail and links behind the
previous holder; release hands the lock to the linked successor or swings
the tail back to empty with a compare-and-set. Waiters form a FIFO queue
and each handover touches only the successor's node.

On CPython a literal busy-wait on a flag is pathological (a spinner burns
its whole GIL quantum), so the per-node wait uses a pre-acquired
``threading.Lock`` as a one-shot, self-rearming gate: parking is
``gate.acquire()`` and handover is ``gate.release()``. The release may
land before the waiter parks; the park then returns immediately and the
gate is armed again for the next round. Queue discipline, swap-based
enqueue, CAS-based release and FIFO handover are unchanged.
"""

from __future__ import annotations

import threading
import time
from contextlib import contextmanager


class MCSNode:
    """Per-worker queue node; reusable across acquisitions, never shared."""

    __slots__ = ("gate", "next", "ticket")

    def __init__(self) -> None:
        self.gate = threading.Lock()
        self.gate.acquire()  # armed: the next release() wakes one park
        self.next: MCSNode | None = None
        self.ticket = 0


class MCSLock:
    """FIFO queue spin lock; pass a distinct MCSNode per concurrent caller.

    With ``record_grants=True`` the lock assigns each acquisition a ticket
    at enqueue time (atomically with the tail swap) and logs tickets in
    the order the lock was granted, so tests can audit FIFO handover.
    """

    def __init__(self, record_grants: bool = False) -> None:
        self._tail: MCSNode | None = None
        self._tail_lock = threading.Lock()
        self._record = record_grants
        self._ticket = 0
        self.grant_log: list[int] = []

    def acquire(self, node: MCSNode) -> None:
        """Block until the lock is held via ``node``.

        ``node`` must not currently be enqueued.
        """
        node.next = None
        tl = self._tail_lock
        tl.acquire()
        pred = self._tail
        self._tail = node
        if self._record:
            self._ticket += 1
            node.ticket = self._ticket
        tl.release()
        if pred is not None:
            pred.next = node
            node.gate.acquire()  # park until predecessor hands over
        if self._record:
            self.grant_log.append(node.ticket)  # single holder: no race

    def release(self, node: MCSNode) -> None:
        """Hand the lock to the successor, or free it if none is queued."""
        nxt = node.next
        if nxt is None:
            tl = self._tail_lock
            tl.acquire()
            if self._tail is node:
                self._tail = None
                tl.release()
                return
            tl.release()
            # a racing enqueue swapped the tail but has not linked yet
            while node.next is None:
                time.sleep(0)
            nxt = node.next
        nxt.gate.release()

    @contextmanager
    def guard(self, node: MCSNode):
        self.acquire(node)
        try:
            yield
        finally:
            self.release(node)

    def locked(self) -> bool:
        """Whether any holder or waiter is present (diagnostic)."""
        return self._tail is not None
