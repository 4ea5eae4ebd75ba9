"""Adaptive monopulse angle and range estimation for space-time coding planar arrays."""

from .array_model import Direction, RadarConfig, Steer, full_steering
from .monopulse import Estimate
from .pipeline import Scenario, run_trial, table2_scenario
from .scene import Emitter, SnapshotBatch, synthesize

__all__ = [
    "Direction",
    "Emitter",
    "Estimate",
    "RadarConfig",
    "Scenario",
    "SnapshotBatch",
    "Steer",
    "full_steering",
    "run_trial",
    "synthesize",
    "table2_scenario",
]

__version__ = "0.1.0"
