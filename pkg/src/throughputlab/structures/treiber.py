"""Lock-free-style stack: push and pop retry a CAS on the head reference.

The head is stored as an immutable ``(top_node, stamp)`` pair replaced as
a whole; the stamp increases on every successful update so a stale pair
can never compare equal again even if an identical top node resurfaces.
Nodes popped while another operation still holds a reference are left to
the garbage collector, never recycled into the stack, so the classic
reuse hazard cannot occur.

Atomicity of the compare-and-set itself is provided by a private lock
(CPython has no user-level CAS primitive); contended operations retry
exactly like the hardware loop would.
"""

from __future__ import annotations

import threading
from typing import Any, Callable, Iterator


class _Empty:
    __slots__ = ()

    def __repr__(self) -> str:
        return "EMPTY"


#: Distinguished pop result for an empty stack; never a legal stored value.
EMPTY = _Empty()


class _Node:
    __slots__ = ("data", "next")

    def __init__(self, data: Any, next: "_Node | None") -> None:
        self.data = data
        self.next = next


class TreiberStack:
    def __init__(self) -> None:
        self._head: tuple[_Node | None, int] = (None, 0)
        self._cas_lock = threading.Lock()

    def _cas_head(self, expected: tuple, new_top: _Node | None) -> bool:
        with self._cas_lock:
            cur = self._head
            if cur is expected:
                self._head = (new_top, cur[1] + 1)
                return True
            return False

    def _retry_update(self, step: Callable[[_Node | None], Any]) -> Any:
        """Generic retry loop shared by push and pop.

        ``step`` maps the current top node to ``(new_top, result)``, or to
        ``EMPTY`` to bail out without touching the stack.
        """
        while True:
            cur = self._head
            outcome = step(cur[0])
            if outcome is EMPTY:
                return EMPTY
            new_top, result = outcome
            if self._cas_head(cur, new_top):
                return result

    def push(self, value: Any) -> None:
        node = _Node(value, None)

        def step(top: _Node | None):
            node.next = top
            return node, None

        self._retry_update(step)

    def pop(self) -> Any:
        """Remove and return the top value, or EMPTY if the stack is empty."""

        def step(top: _Node | None):
            if top is None:
                return EMPTY
            return top.next, top.data

        return self._retry_update(step)

    def peek(self) -> Any:
        top = self._head[0]
        return EMPTY if top is None else top.data

    def __iter__(self) -> Iterator[Any]:
        """Top-to-bottom snapshot walk; callers must ensure quiescence."""
        node = self._head[0]
        while node is not None:
            yield node.data
            node = node.next

    def __len__(self) -> int:
        return sum(1 for _ in self)

    def __bool__(self) -> bool:
        return self._head[0] is not None
