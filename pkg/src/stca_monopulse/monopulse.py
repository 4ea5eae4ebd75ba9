"""Inversion of monopulse ratio curves into elevation, azimuth and range.

Near the steer point the imaginary part of each difference/sum ratio is a
negative tangent of the parameter offset:

    elevation  -tan(pi * M * (d/lambda) * (way/2) * cos(theta0) * (theta - theta0))
    azimuth    -tan(pi * N * (d/(2 lambda)) * cos(theta0) * cos(phi0) * (phi - phi0))
    range      -tan(pi * mu * M * dt / c * (R - R0))

``way`` is 2 for the two-way MIMO/STCA vertical manifold and 1 for a
receive-only one. Each curve is monotone on the open window where its tan
argument stays inside (-pi/2, pi/2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, NamedTuple, Optional

import numpy as np

from .array_model import (
    AXES,
    SPEED_OF_LIGHT,
    RadarConfig,
    Steer,
    axis_pattern,
    axis_phase,
    quiescent_monopulse_weights,
)

# Estimates closer to the window edge than this fraction are flagged invalid.
DEFAULT_GUARD = 0.95


class AxisEstimate(NamedTuple):
    value: float
    valid: bool


@dataclass(frozen=True)
class MonopulseRatio:
    value: complex
    axis: str


@dataclass(frozen=True)
class Estimate:
    """Joint estimate; angles in radians, range in meters (None when not measured)."""

    elevation: float
    azimuth: float
    range: Optional[float]
    valid: Dict[str, bool] = field(default_factory=dict)
    windows: Dict[str, float] = field(default_factory=dict)

    @property
    def all_valid(self) -> bool:
        return all(self.valid.values())


def curve_slope(cfg: RadarConfig, steer: Steer, axis: str) -> float:
    """Coefficient k with ratio curve ``-tan(k * offset)``."""
    if axis == "elevation":
        return np.pi * cfg.rows * cfg.spacing_ratio * (cfg.elevation_way / 2.0) * np.cos(steer.elevation)
    if axis == "azimuth":
        return (np.pi * cfg.cols * cfg.spacing_ratio / 2.0
                * np.cos(steer.elevation) * np.cos(steer.azimuth))
    if axis == "range":
        if cfg.time_shift <= 0:
            raise ValueError("range curve needs a positive time shift")
        return np.pi * cfg.chirp_rate * cfg.rows * cfg.time_shift / SPEED_OF_LIGHT
    raise ValueError(f"unknown axis {axis!r}; expected one of {AXES}")


def window(cfg: RadarConfig, steer: Steer, axis: str) -> float:
    """Half-width of the unambiguous window around the steer point."""
    return 0.5 * np.pi / curve_slope(cfg, steer, axis)


def steer_value(steer: Steer, axis: str) -> float:
    return {"elevation": steer.elevation, "azimuth": steer.azimuth, "range": steer.range}[axis]


def ratio_curve(cfg: RadarConfig, steer: Steer, axis: str, offset):
    """Closed-form Im(ratio) at ``offset`` from the steer point (rad or m)."""
    offset = np.asarray(offset, dtype=float)
    half = window(cfg, steer, axis)
    if np.any(np.abs(offset) >= half):
        raise ValueError(f"{axis} offset outside the unambiguous window +/-{half:.6g}")
    return -np.tan(curve_slope(cfg, steer, axis) * offset)


def invert_ratio(cfg: RadarConfig, steer: Steer, axis: str, measured: float,
                 guard: float = DEFAULT_GUARD) -> AxisEstimate:
    """Parameter estimate from a measured Im(ratio), principal branch only."""
    base = steer_value(steer, axis)
    if not np.isfinite(measured):
        return AxisEstimate(float("nan"), False)
    k = curve_slope(cfg, steer, axis)
    offset = -np.arctan(measured) / k
    valid = abs(offset) < guard * window(cfg, steer, axis)
    return AxisEstimate(float(base + offset), bool(valid))


def quiescent_ratio(cfg: RadarConfig, steer: Steer, axis: str, offset, positions=None):
    """Exact difference/sum ratio of the quiescent line beams (no linearisation).

    ``offset`` moves the source along ``axis`` only; the other coordinates
    stay at the steer point. ``positions`` places the line elements (for
    subarray phase centers); default is 0..L-1.
    """
    offset = np.asarray(offset, dtype=float)
    coords = {"elevation": steer.elevation, "azimuth": steer.azimuth, "range_m": steer.range}
    key = "range_m" if axis == "range" else axis
    coords[key] = coords[key] + offset
    phase = axis_phase(cfg, axis, **coords)
    w_sum = quiescent_monopulse_weights(cfg, steer, axis, "sum", positions)
    w_diff = quiescent_monopulse_weights(cfg, steer, axis, "difference", positions)
    return axis_pattern(w_diff, phase, positions) / axis_pattern(w_sum, phase, positions)


def estimate_from_ratios(cfg: RadarConfig, steer: Steer, ratios: Dict[str, complex],
                         guard: float = DEFAULT_GUARD) -> Estimate:
    """Invert every available axis ratio. Missing range leaves ``range`` as None."""
    values, valid, windows = {}, {}, {}
    for axis, ratio in ratios.items():
        est = invert_ratio(cfg, steer, axis, float(np.imag(ratio)), guard)
        values[axis], valid[axis] = est.value, est.valid
        windows[axis] = float(window(cfg, steer, axis))
    return Estimate(values.get("elevation", float("nan")), values.get("azimuth", float("nan")),
                    values.get("range"), valid, windows)


def half_beamwidth(cfg: RadarConfig, steer: Steer, axis: str) -> float:
    """Half of the 3 dB sum-beam width along ``axis``.

    The unambiguous window ends at the first sum-pattern null; a uniform
    line's 3 dB half-width is 0.443 of that.
    """
    return 0.443 * window(cfg, steer, axis)
