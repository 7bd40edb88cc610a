"""Concurrency performance lab.

Implements the MCS queue lock, the Treiber stack, and a fat-node
skip-list set; predicts lock/stack throughput with closed-form piecewise
formulas; and validates the predictions with a deterministic schedule
simulator and a real-thread microbenchmark harness.
"""

from .model import (
    CalibrationError,
    CostModel,
    Prediction,
    Regime,
    WorkloadParams,
    crossover_mcs,
    crossover_treiber,
    discontinuity_mcs,
    fit_alpha,
    predict_mcs,
    predict_treiber,
)
from .engine import SimResult, SimulationError, simulate, sweep
from .programs import AbstractProgram, build_mcs_program, build_treiber_program

__all__ = [
    "CalibrationError",
    "CostModel",
    "Prediction",
    "Regime",
    "WorkloadParams",
    "crossover_mcs",
    "crossover_treiber",
    "discontinuity_mcs",
    "fit_alpha",
    "predict_mcs",
    "predict_treiber",
    "SimResult",
    "SimulationError",
    "simulate",
    "sweep",
    "AbstractProgram",
    "build_mcs_program",
    "build_treiber_program",
]

__version__ = "0.1.0"
