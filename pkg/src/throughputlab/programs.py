"""Annotated instruction sequences consumed by the schedule simulator.

A program is a factory of per-worker generators. Each generator yields
instruction tuples (shared accesses, local work, the operation boundary)
and receives access results back through ``send``. Control flow (retry
loops, the contended/uncontended paths) lives in ordinary Python
``if``/``while`` around the yields; the instruction vocabulary itself is
deliberately tiny:

    LocalWork(cycles)               private computation, no memory traffic
    Read(var, cost)                 shared read
    Write(var, value, cost)         shared write
    GetAndSet(var, value, cost)     atomic swap, returns the old value
    CAS(var, expected, new, cost)   atomic compare-and-swap, returns bool
    SpinUntil(var, value, cost)     wait until the variable holds (or, with
                                    until_not, stops holding) a value
    OpBoundary()                    one completed operation is counted here

Costs are symbolic classes ("W", "RI", "M", "X", "UNIT") resolved
against a CostModel when the program runs. A Read may open a variable
round and a CAS may close it: the engine then keeps the variable granted
to one worker from the read through its CAS, which is the schedule under
which retry loops do no wasted work (see engine module).

Instruction tuples are plain tuples with an integer opcode in slot 0 so
the engine can dispatch cheaply.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Generator, Sequence

OP_LOCAL = 0
OP_READ = 1
OP_WRITE = 2
OP_GAS = 3
OP_CAS = 4
OP_SPIN = 5
OP_BOUNDARY = 6

COST_CLASSES = ("W", "RI", "M", "X", "UNIT")

NULL = -1  # null reference in integer-encoded programs

Instruction = tuple
WorkerBody = Generator[Instruction, object, None]


def LocalWork(cycles: int) -> Instruction:
    if cycles < 0:
        raise ValueError(f"LocalWork cycles must be >= 0, got {cycles}")
    return (OP_LOCAL, cycles)


def Read(var: int, cost: str = "M", opens_round: bool = False) -> Instruction:
    return (OP_READ, var, cost, opens_round)


def Write(var: int, value: int, cost: str = "W") -> Instruction:
    return (OP_WRITE, var, value, cost)


def GetAndSet(var: int, value: int, cost: str = "W") -> Instruction:
    return (OP_GAS, var, value, cost)


def CAS(var: int, expected: int, new: int, cost: str = "W", closes_round: bool = False) -> Instruction:
    return (OP_CAS, var, expected, new, cost, closes_round)


def SpinUntil(var: int, value: int, cost: str = "RI", until_not: bool = False) -> Instruction:
    return (OP_SPIN, var, value, cost, until_not)


def OpBoundary() -> Instruction:
    return (OP_BOUNDARY,)


@dataclass(frozen=True)
class AbstractProgram:
    """A named workload: shared-variable layout plus per-worker behavior.

    ``var_init(N)`` gives initial values for the declared variables;
    ``body(worker, N)`` builds the worker's infinite operation loop. One
    OpBoundary is reached exactly once per loop iteration.
    """

    name: str
    structure: str
    C: int
    P: int
    var_init: Callable[[int], Sequence[int]]
    body: Callable[[int, int], WorkerBody]
    var_names: Callable[[int, int], str]


def build_mcs_program(C: int, P: int) -> AbstractProgram:
    """Queue-lock operation loop: acquire, critical C, release, parallel P.

    Shared layout for N workers: var 0 is the queue tail (NULL when free),
    vars 1..N are per-worker handover flags, vars N+1..2N per-worker
    successor links. Cost classes: flag init write W, tail swap W,
    successor link UNIT, handover wait RI per effective probe, successor
    check RI, tail compare-and-swap W, handover write W. The operation is
    counted after the release, before the parallel section.
    """
    if C < 0 or P < 0:
        raise ValueError(f"C and P must be >= 0, got C={C}, P={P}")

    def var_init(N: int) -> Sequence[int]:
        # tail, then locked[w], then next[w]
        return [NULL] + [0] * N + [NULL] * N

    def var_names(idx: int, N: int) -> str:
        if idx == 0:
            return "tail"
        if idx <= N:
            return f"locked[{idx - 1}]"
        return f"next[{idx - 1 - N}]"

    def body(me: int, N: int) -> WorkerBody:
        tail = 0
        my_flag = 1 + me
        my_next = 1 + N + me
        while True:
            yield Write(my_next, NULL, "UNIT")   # fresh node: no successor yet
            yield Write(my_flag, 1, "W")         # arm the handover flag
            pred = yield GetAndSet(tail, me, "W")
            if pred != NULL:
                yield Write(1 + N + pred, me, "UNIT")  # link behind predecessor
                yield SpinUntil(my_flag, 0, "RI")      # wait for handover
            if C:
                yield LocalWork(C)
            nxt = yield Read(my_next, "RI")
            if nxt == NULL:
                freed = yield CAS(tail, me, NULL, "W")
                if not freed:
                    nxt = yield SpinUntil(my_next, NULL, "RI", until_not=True)
            if nxt != NULL:
                yield Write(1 + nxt, 0, "W")     # hand over to successor
            yield OpBoundary()
            if P:
                yield LocalWork(P)

    return AbstractProgram(
        name=f"mcs(C={C},P={P})",
        structure="mcs",
        C=C,
        P=P,
        var_init=var_init,
        body=body,
        var_names=var_names,
    )


def build_treiber_program(P: int) -> AbstractProgram:
    """Retry-loop stack operation: read head, relink, CAS head, then P.

    Var 0 is the head, modeled as a version counter (only CAS identity
    matters for the schedule). The relink of a private node costs no
    shared traffic, so it is LocalWork(0). The read opens a head round and
    the CAS closes it; a failed CAS loops back to the read, charging a
    full extra M+W retry round. The operation is counted after the
    successful CAS, before the parallel section.
    """
    if P < 0:
        raise ValueError(f"P must be >= 0, got {P}")

    def var_init(N: int) -> Sequence[int]:
        return [0]

    def var_names(idx: int, N: int) -> str:
        return "head"

    def body(me: int, N: int) -> WorkerBody:
        head = 0
        while True:
            while True:
                cur = yield Read(head, "M", opens_round=True)
                yield LocalWork(0)  # private link update
                ok = yield CAS(head, cur, cur + 1, "W", closes_round=True)
                if ok:
                    break
            yield OpBoundary()
            if P:
                yield LocalWork(P)

    return AbstractProgram(
        name=f"treiber(P={P})",
        structure="treiber",
        C=0,
        P=P,
        var_init=var_init,
        body=body,
        var_names=var_names,
    )
