"""Closed-form throughput prediction for lock and retry-loop workloads.

The model prices shared-memory traffic with four per-access costs, in
cycles: W (write / atomic RMW), Ri (read of a cache line invalidated by
another core), M (shared atomic read), and X (alternate contended-RMW
cost; recorded for completeness, never consumed by the closed forms).
Throughput comes out in operations per second once scaled by the
machine factor alpha; with alpha=1 it is operations per cycle.

Both workloads have two regimes:

* saturated -- the serialized handover/retry path is the bottleneck;
  throughput is independent of the worker count and the parallel
  section,
* thread-bound -- every worker runs its full loop unhindered;
  throughput scales linearly with the worker count.

The branch condition uses non-strict <=; ties go to the saturated
branch. The two lock-workload branches do not agree at the boundary
(the saturated denominator carries 2*Ri where the thread-bound one
carries Ri); ``discontinuity_mcs`` quantifies the jump instead of
papering over it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Iterable, Protocol


class CalibrationError(ValueError):
    """Raised when fit_alpha has nothing usable to fit against."""


class Regime(enum.Enum):
    SATURATED = "Saturated"
    THREAD_BOUND = "ThreadBound"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class CostModel:
    """Per-access-class costs in cycles plus the machine scale factor."""

    alpha: float = 1.0
    W: int = 1
    Ri: int = 1
    M: int = 1
    X: int = 0

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        for name in ("W", "Ri", "M"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {v!r}")
        if not isinstance(self.X, int) or self.X < 0:
            raise ValueError(f"X must be an integer >= 0, got {self.X!r}")


@dataclass(frozen=True)
class WorkloadParams:
    """Worker count plus critical/parallel section sizes in cycles."""

    N: int
    C: int = 0
    P: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.N, int) or self.N < 1:
            raise ValueError(f"N must be an integer >= 1, got {self.N!r}")
        for name in ("C", "P"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")


@dataclass(frozen=True)
class Prediction:
    regime: Regime
    throughput: float


def predict_mcs(model: CostModel, w: WorkloadParams) -> Prediction:
    """Predicted throughput of the queue-lock workload (acquire, C, release, P)."""
    W, Ri, C, P, N = model.W, model.Ri, w.C, w.P, w.N
    if P + W <= (N - 1) * (2 * W + C + Ri):
        return Prediction(Regime.SATURATED, model.alpha * (1.0 / (2 * Ri + C + 2 * W)))
    return Prediction(Regime.THREAD_BOUND, model.alpha * (N / ((2 * W + C + Ri) + (P + W))))


def predict_treiber(model: CostModel, w: WorkloadParams) -> Prediction:
    """Predicted throughput of the retry-loop stack workload (one op, then P).

    C is not part of this workload and is ignored.
    """
    W, M, P, N = model.W, model.M, w.P, w.N
    if P <= (N - 1) * (M + W):
        return Prediction(Regime.SATURATED, model.alpha * (1.0 / (M + W)))
    return Prediction(Regime.THREAD_BOUND, model.alpha * (N / (P + M + W)))


def crossover_mcs(model: CostModel, C: int, N: int) -> int:
    """Largest P still in the lock workload's saturated regime.

    May be negative for N=1 (the saturated regime is unreachable);
    returned as-is.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    return (N - 1) * (2 * model.W + C + model.Ri) - model.W


def crossover_treiber(model: CostModel, N: int) -> int:
    """Largest P still in the stack workload's saturated regime."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    return (N - 1) * (model.M + model.W)


def discontinuity_mcs(model: CostModel, C: int, N: int) -> float:
    """Relative jump between the two lock-workload branches at the crossover.

    Evaluates both branches at P = crossover_mcs and returns
    (thread_bound - saturated) / saturated. Zero would mean the piecewise
    formula is continuous there; the printed form is not (2*Ri vs Ri).
    """
    p_star = crossover_mcs(model, C, N)
    if p_star < 0:
        return 0.0
    sat = predict_mcs(model, WorkloadParams(N=N, C=C, P=max(p_star, 0))).throughput
    W, Ri = model.W, model.Ri
    tb = model.alpha * (N / ((2 * W + C + Ri) + (p_star + W)))
    return (tb - sat) / sat


class ThroughputRecord(Protocol):
    """Anything carrying a workload point and a measured throughput."""

    N: int
    C: int
    P: int
    throughput_ops_s: float


_PREDICTORS = {"mcs": predict_mcs, "treiber": predict_treiber}


def fit_alpha(records: Iterable[ThroughputRecord], model: CostModel, kind: str) -> CostModel:
    """Least-squares alpha against measured throughputs; formulas unchanged.

    Minimizes sum((alpha * base_i - measured_i)^2) where base_i is the
    applicable branch evaluated at alpha=1, giving
    alpha = sum(base*measured) / sum(base^2).
    """
    if kind not in _PREDICTORS:
        raise ValueError(f"unknown workload kind {kind!r}; expected one of {sorted(_PREDICTORS)}")
    predictor = _PREDICTORS[kind]
    unit = replace(model, alpha=1.0)
    num = 0.0
    den = 0.0
    count = 0
    for rec in records:
        base = predictor(unit, WorkloadParams(N=rec.N, C=rec.C, P=rec.P)).throughput
        num += base * rec.throughput_ops_s
        den += base * base
        count += 1
    if count == 0:
        raise CalibrationError("no records to calibrate against")
    if den == 0.0:
        raise CalibrationError("all predictions are zero; cannot fit a scale")
    if num <= 0.0:
        raise CalibrationError("measured throughputs do not support a positive alpha")
    return replace(model, alpha=num / den)
