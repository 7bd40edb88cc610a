"""Real-thread microbenchmark harness for the three structures.

Workloads mirror the modeled ones: the lock workload loops {acquire,
spin C, release, spin P}; the stack workload loops {one push or pop,
spin P}; the set workload runs a contains/insert/remove mix over a key
range. C and P are calibrated spin loops (``for _ in range(n): pass``),
not sleeps.

Workers are released together by a barrier and stopped by a shared flag.
Each worker counts operations in its own cell with no hot-path
synchronization; the coordinator snapshots the cells at the start and
end of the measurement window, so warmup is excluded and the reported
duration is measured wall time.

CPython note: thread throughput here is governed by the GIL. The
harness raises the interpreter switch interval (default 0.1 s) for the
run's duration; at the 5 ms default a contended lock convoys on futex
wakeups an order of magnitude slower without changing what is measured.
"""

from __future__ import annotations

import os
import random
import statistics
import sys
import threading
import time
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Callable, Optional

from .schema import Row
from .structures import EMPTY, FatNodeSkipListSet, MCSLock, MCSNode, TreiberStack

STRUCTURES = ("mcs", "treiber", "skiplist")


def default_host_tag() -> str:
    return os.environ.get("THROUGHPUTLAB_HOST_TAG", "")


@dataclass(frozen=True)
class BenchConfig:
    structure: str
    N: int
    C: int = 0
    P: int = 0
    k: int = 32
    mix_contains: int = 90
    mix_insert: int = 5
    mix_remove: int = 5
    key_range: int = 100_000
    prefill: float = 0.5
    warmup_s: float = 0.2
    duration_s: float = 1.0
    seed: int = 0
    host_tag: str = field(default_factory=default_host_tag)
    pin_cores: bool = False
    switch_interval: Optional[float] = 0.1

    def __post_init__(self) -> None:
        if self.structure not in STRUCTURES:
            raise ValueError(f"structure must be one of {STRUCTURES}, got {self.structure!r}")
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if self.C < 0 or self.P < 0:
            raise ValueError("C and P must be >= 0")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.mix_contains + self.mix_insert + self.mix_remove != 100:
            raise ValueError("operation mix must sum to 100")
        if not 0.0 <= self.prefill <= 1.0:
            raise ValueError(f"prefill must be in [0, 1], got {self.prefill}")
        if self.duration_s <= 0:
            raise ValueError("duration_s must be positive")
        if self.warmup_s < 0:
            raise ValueError("warmup_s must be >= 0")
        if self.key_range < 1:
            raise ValueError("key_range must be >= 1")


@dataclass(frozen=True)
class BenchRecord:
    """One measured run; flattens the config for CSV export."""

    config: BenchConfig
    throughput_ops_s: float
    per_worker_throughput: tuple
    measured_duration_s: float
    empty_pops: int
    timestamp: str

    @property
    def N(self) -> int:
        return self.config.N

    @property
    def C(self) -> int:
        return self.config.C

    @property
    def P(self) -> int:
        return self.config.P

    def to_row(self) -> Row:
        cfg = self.config
        skiplist = cfg.structure == "skiplist"
        return Row(
            source="bench",
            structure=cfg.structure,
            N=cfg.N,
            C=cfg.C if cfg.structure == "mcs" else None,
            P=None if skiplist else cfg.P,
            k=cfg.k if skiplist else None,
            mix_contains=cfg.mix_contains if skiplist else None,
            mix_insert=cfg.mix_insert if skiplist else None,
            mix_remove=cfg.mix_remove if skiplist else None,
            key_range=cfg.key_range if skiplist else None,
            prefill=cfg.prefill if cfg.structure != "mcs" else None,
            duration_s=self.measured_duration_s,
            throughput_ops_s=self.throughput_ops_s,
            seed=cfg.seed,
            host_tag=cfg.host_tag,
        )


class HarnessError(RuntimeError):
    """Worker spawn or coordination failure; partial results discarded."""


def _pin_current_thread(worker_id: int) -> None:
    try:
        cpus = sorted(os.sched_getaffinity(0))
        os.sched_setaffinity(threading.get_native_id(), {cpus[worker_id % len(cpus)]})
    except (AttributeError, OSError):
        pass  # pinning is best-effort


def _run_workers(cfg: BenchConfig, body: Callable[[int, list, list], None]) -> tuple[list, float]:
    """Spawn N workers running ``body(worker_id, counters, stop)``.

    Returns per-worker op counts inside the measurement window and the
    measured window duration in seconds.
    """
    counters = [[0, 0] for _ in range(cfg.N)]  # [ops, empty_pops]
    stop = [False]
    barrier = threading.Barrier(cfg.N + 1)
    failures: list[BaseException] = []

    def runner(wid: int) -> None:
        if cfg.pin_cores:
            _pin_current_thread(wid)
        try:
            barrier.wait()
        except threading.BrokenBarrierError:
            return
        try:
            body(wid, counters[wid], stop)
        except BaseException as exc:  # surfaced as HarnessError below
            failures.append(exc)
            stop[0] = True

    threads = [threading.Thread(target=runner, args=(w,), daemon=True) for w in range(cfg.N)]
    old_interval = sys.getswitchinterval()
    if cfg.switch_interval is not None:
        sys.setswitchinterval(cfg.switch_interval)
    try:
        try:
            for t in threads:
                t.start()
        except RuntimeError as exc:
            stop[0] = True
            barrier.abort()
            raise HarnessError(f"failed to spawn workers: {exc}") from exc
        barrier.wait()
        time.sleep(cfg.warmup_s)
        start_counts = [cell[0] for cell in counters]
        t0 = time.perf_counter()
        time.sleep(cfg.duration_s)
        end_counts = [cell[0] for cell in counters]
        t1 = time.perf_counter()
        stop[0] = True
        for t in threads:
            t.join()
    finally:
        sys.setswitchinterval(old_interval)
    if failures:
        raise HarnessError(f"worker failed: {failures[0]!r}") from failures[0]
    window = [end - start for start, end in zip(start_counts, end_counts)]
    empties = [cell[1] for cell in counters]
    return [window, empties], t1 - t0


def _record(cfg: BenchConfig, per_worker: list, empties: list, measured: float) -> BenchRecord:
    total = sum(per_worker)
    return BenchRecord(
        config=cfg,
        throughput_ops_s=total / measured,
        per_worker_throughput=tuple(c / measured for c in per_worker),
        measured_duration_s=measured,
        empty_pops=sum(empties),
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )


def run_lock_bench(cfg: BenchConfig) -> BenchRecord:
    """N workers loop {acquire; spin C; release; spin P}."""
    if cfg.structure != "mcs":
        raise ValueError(f"lock bench needs structure='mcs', got {cfg.structure!r}")
    lock = MCSLock()
    spin_c = range(cfg.C)
    spin_p = range(cfg.P)

    def body(wid: int, cell: list, stop: list) -> None:
        node = MCSNode()
        acquire, release = lock.acquire, lock.release
        while not stop[0]:
            acquire(node)
            for _ in spin_c:
                pass
            release(node)
            for _ in spin_p:
                pass
            cell[0] += 1

    (per_worker, empties), measured = _run_workers(cfg, body)
    return _record(cfg, per_worker, empties, measured)


def run_stack_bench(cfg: BenchConfig) -> BenchRecord:
    """N workers loop {one stack op; spin P}, alternating push and pop.

    The stack is prefilled with ``prefill * key_range`` elements so pops
    rarely find it empty; empty pops are counted, not retried.
    """
    if cfg.structure != "treiber":
        raise ValueError(f"stack bench needs structure='treiber', got {cfg.structure!r}")
    stack = TreiberStack()
    for i in range(int(cfg.prefill * cfg.key_range)):
        stack.push(i)
    spin_p = range(cfg.P)

    def body(wid: int, cell: list, stop: list) -> None:
        push, pop = stack.push, stack.pop
        rng = random.Random(cfg.seed + wid)
        value = rng.randrange(cfg.key_range)
        pushing = wid % 2 == 0
        while not stop[0]:
            if pushing:
                push(value)
            else:
                if pop() is EMPTY:
                    cell[1] += 1
            pushing = not pushing
            for _ in spin_p:
                pass
            cell[0] += 1

    (per_worker, empties), measured = _run_workers(cfg, body)
    return _record(cfg, per_worker, empties, measured)


def run_set_bench(cfg: BenchConfig) -> BenchRecord:
    """N workers run the configured contains/insert/remove mix over the key range."""
    if cfg.structure != "skiplist":
        raise ValueError(f"set bench needs structure='skiplist', got {cfg.structure!r}")
    table = FatNodeSkipListSet(capacity=cfg.k, seed=cfg.seed)
    rng = random.Random(cfg.seed)
    target = int(cfg.prefill * cfg.key_range)
    if target:
        for key in rng.sample(range(cfg.key_range), target):
            table.insert(key)
    spin_p = range(cfg.P)
    contains_cut = cfg.mix_contains
    insert_cut = cfg.mix_contains + cfg.mix_insert

    def body(wid: int, cell: list, stop: list) -> None:
        rng = random.Random(cfg.seed + wid + 1)
        randrange = rng.randrange
        contains, insert, remove = table.contains, table.insert, table.remove
        key_range = cfg.key_range
        while not stop[0]:
            op = randrange(100)
            key = randrange(key_range)
            if op < contains_cut:
                contains(key)
            elif op < insert_cut:
                insert(key)
            else:
                remove(key)
            for _ in spin_p:
                pass
            cell[0] += 1

    (per_worker, empties), measured = _run_workers(cfg, body)
    return _record(cfg, per_worker, empties, measured)


_RUNNERS = {"mcs": run_lock_bench, "treiber": run_stack_bench, "skiplist": run_set_bench}


def run_bench(cfg: BenchConfig) -> BenchRecord:
    return _RUNNERS[cfg.structure](cfg)


# -- comparison ----------------------------------------------------------


def _config_key(rec: BenchRecord) -> tuple:
    cfg = rec.config
    return (
        cfg.structure,
        cfg.N,
        cfg.C,
        cfg.P,
        cfg.mix_contains,
        cfg.mix_insert,
        cfg.mix_remove,
        cfg.key_range,
        cfg.prefill,
    )


@dataclass(frozen=True)
class ComparisonReport:
    """Per-configuration candidate/baseline throughput ratios."""

    ratios: tuple  # ((key, ratio), ...)
    min_ratio: float
    median_ratio: float
    max_ratio: float

    def summary(self) -> str:
        lines = [f"{'config':<60} ratio"]
        for key, ratio in self.ratios:
            lines.append(f"{str(key):<60} {ratio:.4f}")
        lines.append(
            f"min {self.min_ratio:.4f}  median {self.median_ratio:.4f}  max {self.max_ratio:.4f}"
        )
        return "\n".join(lines)


def compare(baseline: list, candidate: list) -> ComparisonReport:
    """Ratio candidate/baseline per shared configuration (k may differ).

    Raises ValueError listing any configuration present on one side only.
    """
    base = {}
    for rec in baseline:
        base.setdefault(_config_key(rec), []).append(rec.throughput_ops_s)
    cand = {}
    for rec in candidate:
        cand.setdefault(_config_key(rec), []).append(rec.throughput_ops_s)
    missing = sorted(set(cand) ^ set(base))
    if missing:
        raise ValueError(f"mismatched configurations between baseline and candidate: {missing}")
    if not base:
        raise ValueError("nothing to compare: no records given")
    ratios = []
    for key in sorted(base):
        ratios.append((key, statistics.fmean(cand[key]) / statistics.fmean(base[key])))
    values = sorted(r for _, r in ratios)
    return ComparisonReport(
        ratios=tuple(ratios),
        min_ratio=values[0],
        median_ratio=statistics.median(values),
        max_ratio=values[-1],
    )
