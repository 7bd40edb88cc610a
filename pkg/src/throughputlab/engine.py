"""Deterministic discrete-event execution of abstract programs.

N workers step through their instruction streams over shared variables.
Every shared access occupies its variable's serialization slot for the
access's resolved cost, so two RMWs on one variable never overlap. Three
scheduling rules shape the schedule into the fair, waste-free one the
closed-form model assumes:

* slot grants are FIFO by arrival, with same-cycle arrivals broken by a
  per-variable rotating index (no starvation, fully deterministic);
* a round-opening read keeps the variable granted to its worker until
  that worker's CAS completes, so a retry round is never split by a
  competing access;
* a spin wait is event-driven: re-checks of an unchanged flag are
  cache-resident and free, and the single terminating probe after
  another worker's slot-serialized mutation costs W + Ri: the dirty
  line is written back out of the writer's cache and re-read;
* an RMW that had to queue for the slot pays an extra Ri when granted
  (the cache line moved away while it waited and must be fetched back
  before it can be written);
* a CAS that is going to fail costs X, not W: it writes nothing, it is
  a compare that aborts. The outcome is known when service starts
  because the slot is exclusive;
* plain unannotated stores (UNIT-class writes) drain through a store
  buffer: they commit immediately without occupying the slot, take one
  cycle of the issuing worker's time, and do not take the line
  exclusive, so a spinner woken by one re-checks at unit cost rather
  than paying an invalidated read;
* when several accesses contend for a freed slot, a compare-and-swap is
  granted before a same-cycle swap (release paths drain before new
  arrivals are admitted); remaining ties rotate per contention event;
* a compare-and-swap arriving while a swap on the same variable is
  still in its line-fetch phase (the first min(2*Ri, W) cycles of
  service) is ordered first: the swap restarts after it, once. Release
  paths drain ahead of arrivals that have not yet secured the line.

Simulation is single-threaded and bitwise deterministic for fixed
inputs. The seed parameter is recorded for provenance; the tie-break
policy never consults it.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

from .model import CostModel, Regime
from .programs import (
    OP_BOUNDARY,
    OP_CAS,
    OP_GAS,
    OP_LOCAL,
    OP_READ,
    OP_SPIN,
    OP_WRITE,
    AbstractProgram,
    build_mcs_program,
    build_treiber_program,
)

# Mean blocked/waiting fraction of the measured window above which a run
# is classified as saturated. Chosen so the observed flip tracks the
# predicted crossover: just below the crossover workers still queue
# briefly every operation, just above it waiting collapses to ~0.
SATURATION_WAIT_FRACTION = 0.10

_RESUME, _COMPLETE, _PROBE = 0, 1, 2

_OP_NAMES = {
    OP_READ: "read",
    OP_WRITE: "write",
    OP_GAS: "getAndSet",
    OP_CAS: "cas",
}


class SimulationError(ValueError):
    """Raised for malformed simulation inputs or programs."""


@dataclass(frozen=True)
class SimResult:
    """Throughput observation from one simulated run."""

    program: str
    structure: str
    N: int
    C: int
    P: int
    model: CostModel
    horizon: int
    warmup: int
    total_ops: int
    per_worker_ops: tuple
    throughput_per_cycle: float
    regime_observed: Regime
    wait_fraction: float
    cas_failures: int
    seed: int
    trace: Optional[list] = field(default=None, repr=False, compare=False)

    @property
    def throughput_ops_s(self) -> float:
        """Cycle rate scaled by the model's machine factor."""
        return self.throughput_per_cycle * self.model.alpha


def simulate(
    program: AbstractProgram,
    model: CostModel,
    N: int,
    horizon: int,
    warmup: int = 0,
    seed: int = 0,
    trace: bool = False,
) -> SimResult:
    """Run ``program`` on N workers for ``horizon`` cycles.

    Operations completing in (warmup, horizon] are counted. Identical
    inputs produce an identical SimResult; the trace (when requested)
    records (start, end, worker, op, var, result) per shared access and
    ("op", worker, time) per counted operation boundary.
    """
    if N < 1:
        raise SimulationError(f"N must be >= 1, got {N}")
    if warmup < 0 or horizon <= warmup:
        raise SimulationError(f"need horizon > warmup >= 0, got horizon={horizon}, warmup={warmup}")

    cost_of = {"W": model.W, "RI": model.Ri, "M": model.M, "X": model.X, "UNIT": 1}
    probe_cost = model.Ri  # dirty fetch for an RMW granted after queueing
    dirty_probe = model.W + model.Ri  # terminating probe on a slot-written line
    x_cost = model.X  # a failing CAS aborts without writing

    vals = list(program.var_init(N))
    nv = len(vals)
    writer = [-1] * nv
    store_through = [False] * nv  # last mutation was a buffered plain store
    busy = [False] * nv
    owner = [-1] * nv
    in_service: list = [None] * nv  # (worker, opcode, start) while busy
    queues: list[list] = [[] for _ in range(nv)]
    rot = [0] * nv
    watchers: list[list] = [[] for _ in range(nv)]
    svc_gen = [0] * N  # bumped when a worker's in-flight service is preempted

    gens = [program.body(w, N) for w in range(N)]
    pend: list = [None] * N  # (effect, cost) being serviced, queued, or watched
    res: list = [None] * N
    blocked_at = [0] * N
    wait = [0] * N
    ops = [0] * N
    cas_failures = 0

    heap: list = [(0, w, _RESUME, w, 0) for w in range(N)]
    heapq.heapify(heap)
    push = heapq.heappush
    pop = heapq.heappop
    seq = N
    preempt_window = min(2 * model.Ri, model.W)
    immune: list = [set() for _ in range(nv)]  # services already preempted once

    events: Optional[list] = [] if trace else None

    def wait_add(w: int, start: int, end: int) -> None:
        lo = start if start > warmup else warmup
        hi = end if end < horizon else horizon
        if hi > lo:
            wait[w] += hi - lo

    def grant(v: int, now: int) -> None:
        """Start service for the next eligible queued access on v."""
        nonlocal seq
        if busy[v]:
            return
        q = queues[v]
        if not q:
            return
        own = owner[v]
        if own != -1:
            for i, (_, _, wid) in enumerate(q):
                if wid == own:
                    entry = q.pop(i)
                    break
            else:
                return  # holder not queued; keep others parked
        else:
            first = min(e[:2] for e in q)
            pool = [i for i, e in enumerate(q) if e[0] == first[0]]
            if len(pool) > 1:
                # drain before admit: same-cycle CAS goes ahead of other ops
                cas_pool = [i for i in pool if pend[q[i][2]][0][0] == OP_CAS]
                if cas_pool:
                    pool = cas_pool
                i = pool[rot[v] % len(pool)]
                rot[v] += 1
            else:
                i = pool[0]
            entry = q.pop(i)
        arr_t, arr_seq, wid = entry
        wait_add(wid, blocked_at[wid], now)
        eff, cost = pend[wid]
        op = eff[0]
        if op == OP_CAS and vals[v] != eff[2]:
            cost = x_cost  # doomed compare, no write happens
        elif op != OP_READ:
            # The line left this worker's cache while it queued: an RMW
            # granted after waiting pays the dirty fetch on top of its
            # class cost. Reads are shipped shared and stay at class cost.
            cost += probe_cost
        pend[wid] = (eff, cost)
        busy[v] = True
        in_service[v] = (wid, op, now, arr_t, arr_seq)
        push(heap, (now + cost, seq, _COMPLETE, wid, svc_gen[wid]))
        seq += 1

    def wake(v: int, now: int, cost: int) -> None:
        """Schedule terminating probes for watchers whose condition now holds."""
        nonlocal seq
        lst = watchers[v]
        if not lst:
            return
        val = vals[v]
        keep = []
        for entry in lst:
            wid, target, until_not = entry
            if (val != target) if until_not else (val == target):
                wait_add(wid, blocked_at[wid], now)
                push(heap, (now + cost, seq, _PROBE, wid, 0))
                seq += 1
            else:
                keep.append(entry)
        watchers[v] = keep

    def step(w: int, now: int, value) -> None:
        """Advance worker w until it blocks or schedules a future event."""
        nonlocal seq, cas_failures
        gen = gens[w]
        while True:
            try:
                eff = gen.send(value)
            except StopIteration:
                return
            op = eff[0]
            if op == OP_LOCAL:
                c = eff[1]
                if c == 0:
                    value = None
                    continue
                res[w] = None
                push(heap, (now + c, seq, _RESUME, w, 0))
                seq += 1
                return
            if op == OP_BOUNDARY:
                if warmup < now <= horizon:
                    ops[w] += 1
                    if events is not None:
                        events.append(("op", w, now))
                value = None
                continue
            v = eff[1]
            if not 0 <= v < nv:
                raise SimulationError(
                    f"program {program.name!r} referenced undeclared variable {v} (have {nv})"
                )
            if op == OP_SPIN:
                target, until_not = eff[2], eff[4]
                val = vals[v]
                pend[w] = (eff, 0)
                if (val != target) if until_not else (val == target):
                    if writer[v] in (-1, w) or store_through[v]:
                        cost = 1
                    else:
                        cost = dirty_probe
                    push(heap, (now + cost, seq, _PROBE, w, 0))
                    seq += 1
                else:
                    watchers[v].append((w, target, until_not))
                    blocked_at[w] = now
                return
            # slot-serialized access
            if op == OP_READ:
                cost = cost_of[eff[2]]
            elif op == OP_CAS:
                cost = cost_of[eff[4]]
            else:  # write / getAndSet
                cost = cost_of[eff[3]]
            if op == OP_WRITE and eff[3] == "UNIT":
                # buffered plain store: commits now, never holds the slot
                vals[v] = eff[2]
                writer[v] = w
                store_through[v] = True
                if events is not None:
                    events.append((now, now + 1, w, "write", v, None))
                wake(v, now, 1)
                res[w] = None
                push(heap, (now + 1, seq, _RESUME, w, 0))
                seq += 1
                return
            if busy[v] or (owner[v] != -1 and owner[v] != w):
                svc = in_service[v]
                if (
                    op == OP_CAS
                    and svc is not None
                    and svc[1] == OP_GAS
                    and owner[v] in (-1, w)
                    and now - svc[2] < preempt_window
                    and svc[4] not in immune[v]
                ):
                    # The swap has not secured the line yet: order the
                    # compare-and-swap first and restart the swap after it.
                    ow = svc[0]
                    svc_gen[ow] += 1
                    immune[v].add(svc[4])
                    queues[v].append((svc[3], svc[4], ow))
                    blocked_at[ow] = svc[2]
                    if vals[v] != eff[2]:
                        cost = x_cost
                    pend[w] = (eff, cost)
                    in_service[v] = (w, op, now, now, seq)
                    push(heap, (now + cost, seq, _COMPLETE, w, svc_gen[w]))
                    seq += 1
                    return
                pend[w] = (eff, cost)
                queues[v].append((now, seq, w))
                seq += 1
                blocked_at[w] = now
            else:
                if op == OP_CAS and vals[v] != eff[2]:
                    cost = x_cost  # doomed compare, no write happens
                pend[w] = (eff, cost)
                busy[v] = True
                in_service[v] = (w, op, now, now, seq)
                push(heap, (now + cost, seq, _COMPLETE, w, svc_gen[w]))
                seq += 1
            return

    while heap:
        now, _, code, w, gen = pop(heap)
        if now > horizon:
            break
        if code == _RESUME:
            step(w, now, res[w])
        elif code == _COMPLETE:
            if gen != svc_gen[w]:
                continue  # service was preempted and rescheduled
            eff, cost = pend[w]
            op = eff[0]
            v = eff[1]
            busy[v] = False
            immune[v].discard(in_service[v][4])
            in_service[v] = None
            if op == OP_READ:
                result = vals[v]
                if eff[3]:
                    owner[v] = w
            elif op == OP_WRITE:
                vals[v] = eff[2]
                writer[v] = w
                store_through[v] = False
                result = None
                wake(v, now, dirty_probe)
            elif op == OP_GAS:
                result = vals[v]
                vals[v] = eff[2]
                writer[v] = w
                store_through[v] = False
                wake(v, now, dirty_probe)
            else:  # OP_CAS
                if vals[v] == eff[2]:
                    vals[v] = eff[3]
                    writer[v] = w
                    store_through[v] = False
                    result = True
                    if eff[5] and owner[v] == w:
                        owner[v] = -1
                    wake(v, now, dirty_probe)
                else:
                    result = False
                    cas_failures += 1
            if events is not None:
                events.append((now - cost, now, w, _OP_NAMES[op], v, result))
            grant(v, now)
            step(w, now, result)
        else:  # _PROBE
            eff, _ = pend[w]
            v, target, until_not = eff[1], eff[2], eff[4]
            val = vals[v]
            if (val != target) if until_not else (val == target):
                step(w, now, val)
            else:
                watchers[v].append((w, target, until_not))
                blocked_at[w] = now

    window = horizon - warmup
    total = sum(ops)
    wait_fraction = sum(wait) / (N * window)
    regime = Regime.SATURATED if wait_fraction > SATURATION_WAIT_FRACTION else Regime.THREAD_BOUND
    return SimResult(
        program=program.name,
        structure=program.structure,
        N=N,
        C=program.C,
        P=program.P,
        model=model,
        horizon=horizon,
        warmup=warmup,
        total_ops=total,
        per_worker_ops=tuple(ops),
        throughput_per_cycle=total / window,
        regime_observed=regime,
        wait_fraction=wait_fraction,
        cas_failures=cas_failures,
        seed=seed,
        trace=events,
    )


_BUILDERS: dict = {
    "mcs": build_mcs_program,
    "treiber": lambda C, P: build_treiber_program(P),
}

ProgramBuilder = Union[str, Callable[[int, int], AbstractProgram]]


def sweep(
    builder: ProgramBuilder,
    model: CostModel,
    Ns: Sequence[int],
    Ps: Sequence[int] = (0,),
    Cs: Sequence[int] = (0,),
    horizon: int = 1_000_000,
    warmup: int = 100_000,
    seed: int = 0,
) -> list[SimResult]:
    """Cartesian-product simulation across worker counts and section sizes.

    ``builder`` is "mcs", "treiber", or a callable (C, P) -> program. Every
    returned row carries full parameter provenance for CSV export.
    """
    if isinstance(builder, str):
        try:
            make = _BUILDERS[builder]
        except KeyError:
            raise SimulationError(
                f"unknown program builder {builder!r}; expected one of {sorted(_BUILDERS)}"
            ) from None
    else:
        make = builder
    if not Ns or not Ps or not Cs:
        raise SimulationError("sweep ranges must be non-empty")
    results = []
    for C in Cs:
        for P in Ps:
            program = make(C, P)
            for N in Ns:
                results.append(simulate(program, model, N, horizon, warmup, seed))
    return results


def assert_rmw_serialization(trace: Iterable[tuple]) -> None:
    """Audit a trace: no two RMWs on one variable may ever overlap in time."""
    intervals: dict = {}
    for entry in trace:
        if len(entry) != 6:
            continue
        start, end, _, opname, var, _ = entry
        if opname in ("cas", "getAndSet"):
            intervals.setdefault(var, []).append((start, end))
    for var, spans in intervals.items():
        spans.sort()
        for (s1, e1), (s2, e2) in zip(spans, spans[1:]):
            if s2 < e1:
                raise AssertionError(
                    f"overlapping RMWs on var {var}: [{s1},{e1}) and [{s2},{e2})"
                )
