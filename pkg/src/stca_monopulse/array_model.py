"""Planar-array geometry, steering vectors and quiescent monopulse weights.

Element (m, n) sits in row m (vertical, z axis) and column n (horizontal,
y axis), both 0-based. Full-array vectors are ordered row-major: m is the
outer index, n the inner one, so ``v = kron(a_z, a_y)``.

Rows of a space-time coding array transmit with a per-row time shift, which
makes the vertical steering phase depend on range as well as elevation.
With ``time_shift == 0`` the model reduces to a conventional collocated
MIMO array.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

SPEED_OF_LIGHT = 2.99792458e8

AXES = ("elevation", "azimuth", "range")
KINDS = ("sum", "difference")


@dataclass(frozen=True)
class RadarConfig:
    """Array geometry and waveform constants.

    Defaults reproduce the 16 x 16, X-band, 20 MHz configuration used
    throughout the package's reference scenarios.
    """

    rows: int = 16
    cols: int = 16
    element_spacing: float = 0.015
    carrier: float = 10e9
    bandwidth: float = 20e6
    pulse_width: float = 10e-6
    time_shift: float = 0.05e-6
    prf: float = 20e3
    # False gives a receive-only (one-way) vertical manifold: phased-array baseline.
    two_way_elevation: bool = True

    def __post_init__(self):
        if self.rows < 2 or self.cols < 2:
            raise ValueError(f"array must be at least 2 x 2, got {self.rows} x {self.cols}")
        for name in ("element_spacing", "carrier", "bandwidth", "pulse_width", "prf"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.time_shift < 0:
            raise ValueError("time_shift must be non-negative")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier

    @property
    def chirp_rate(self) -> float:
        return self.bandwidth / self.pulse_width

    @property
    def spacing_ratio(self) -> float:
        """Element spacing in wavelengths, d / lambda."""
        return self.element_spacing / self.wavelength

    @property
    def elevation_way(self) -> int:
        """2 for the two-way (MIMO/STCA) vertical phase, 1 for one-way."""
        return 2 if self.two_way_elevation else 1

    @property
    def num_elements(self) -> int:
        return self.rows * self.cols

    def with_time_shift(self, time_shift: float) -> "RadarConfig":
        return replace(self, time_shift=time_shift)

    def range_phase_per_meter(self) -> float:
        """Vertical phase step per row per meter of range, 4 pi mu dt / c."""
        return 4.0 * np.pi * self.chirp_rate * self.time_shift / SPEED_OF_LIGHT


@dataclass(frozen=True)
class Direction:
    """Arrival direction in radians; ``u`` and ``v`` are direction cosines."""

    azimuth: float
    elevation: float

    @classmethod
    def from_degrees(cls, azimuth: float, elevation: float) -> "Direction":
        return cls(np.deg2rad(azimuth), np.deg2rad(elevation))

    @property
    def u(self) -> float:
        return float(np.cos(self.elevation) * np.sin(self.azimuth))

    @property
    def v(self) -> float:
        return float(np.sin(self.elevation))


@dataclass(frozen=True)
class Steer:
    """Beam pointing (elevation, azimuth in radians; range in meters)."""

    elevation: float
    azimuth: float
    range: float

    @classmethod
    def from_degrees(cls, elevation: float, azimuth: float, range: float) -> "Steer":
        return cls(np.deg2rad(elevation), np.deg2rad(azimuth), float(range))

    @property
    def direction(self) -> Direction:
        return Direction(self.azimuth, self.elevation)


def _positions(count: int, positions: Optional[Sequence[float]]) -> np.ndarray:
    if positions is None:
        return np.arange(count, dtype=float)
    return np.asarray(positions, dtype=float)


def horizontal_phase(cfg: RadarConfig, u) -> np.ndarray:
    """Phase step between adjacent columns for direction cosine ``u``."""
    return 2.0 * np.pi * cfg.spacing_ratio * np.asarray(u, dtype=float)


def _elevation_step(cfg: RadarConfig, elevation) -> np.ndarray:
    return cfg.elevation_way * 2.0 * np.pi * cfg.spacing_ratio * np.sin(elevation)


def _range_step(cfg: RadarConfig, range_m) -> np.ndarray:
    # wrapped: at long range the raw step is hundreds of radians
    return np.mod(cfg.range_phase_per_meter() * np.asarray(range_m, dtype=float), 2.0 * np.pi)


def vertical_phase(cfg: RadarConfig, elevation, range_m=0.0) -> np.ndarray:
    """Phase step between adjacent rows: elevation term plus the STCA range term."""
    return _elevation_step(cfg, elevation) + _range_step(cfg, range_m)


def horizontal_steering(cfg: RadarConfig, direction: Direction, positions=None) -> np.ndarray:
    """Length-N steering vector along the columns, ``exp(j 2 pi (d/lambda) n u)``."""
    pos = _positions(cfg.cols, positions)
    return np.exp(1j * pos * horizontal_phase(cfg, direction.u))


def vertical_steering(cfg: RadarConfig, elevation: float, range_m: float, positions=None) -> np.ndarray:
    """Length-M steering vector along the rows.

    Entry m is ``exp(j 4 pi m ((d/lambda) sin(theta) + mu R dt / c))`` for the
    two-way manifold. Independent of ``range_m`` when ``time_shift == 0``.
    """
    if range_m <= 0:
        raise ValueError("range must be positive")
    pos = _positions(cfg.rows, positions)
    # separate factors so that elevation compensation cancels term by term
    return np.exp(1j * pos * _elevation_step(cfg, elevation)) * np.exp(1j * pos * _range_step(cfg, range_m))


def full_steering(cfg: RadarConfig, direction: Direction, range_m: float) -> np.ndarray:
    a_z = vertical_steering(cfg, direction.elevation, range_m)
    a_y = horizontal_steering(cfg, direction)
    return np.kron(a_z, a_y)


def elevation_compensation(cfg: RadarConfig, elevation: float, positions=None) -> np.ndarray:
    """Per-row factor removing the elevation part of the vertical phase.

    ``vertical_steering(cfg, theta, R) * elevation_compensation(cfg, theta)``
    depends on range only.
    """
    pos = _positions(cfg.rows, positions)
    return np.exp(-1j * pos * _elevation_step(cfg, elevation))


def range_steering(cfg: RadarConfig, range_m: float, positions=None) -> np.ndarray:
    """Compensated (range-only) vertical vector, entry m ``exp(j 4 pi m mu R dt / c)``."""
    pos = _positions(cfg.rows, positions)
    return np.exp(1j * pos * _range_step(cfg, range_m))


def difference_taper(length: int) -> np.ndarray:
    """``[1, ..., 1, -1, ..., -1]``; the first half positive."""
    if length % 2:
        raise ValueError(f"difference beam needs an even axis length, got {length}")
    taper = np.ones(length)
    taper[length // 2:] = -1.0
    return taper


def axis_steering(cfg: RadarConfig, steer: Steer, axis: str, positions=None) -> np.ndarray:
    """Steering vector along one axis at the steer point.

    ``elevation`` uses the range-free vertical manifold, ``range`` the
    compensated one, ``azimuth`` the horizontal manifold.
    """
    if axis == "elevation":
        pos = _positions(cfg.rows, positions)
        return np.exp(1j * pos * vertical_phase(cfg, steer.elevation, 0.0))
    if axis == "range":
        return range_steering(cfg, steer.range, positions)
    if axis == "azimuth":
        return horizontal_steering(cfg, steer.direction, positions)
    raise ValueError(f"unknown axis {axis!r}; expected one of {AXES}")


def quiescent_monopulse_weights(cfg: RadarConfig, steer: Steer, axis: str, kind: str,
                                positions=None) -> np.ndarray:
    """Sum or difference weights for a uniform line along ``axis``.

    The beam output for data ``x`` is ``w.conj() @ x``. Difference weights
    negate the second half of the sum weights.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown beam kind {kind!r}")
    w = axis_steering(cfg, steer, axis, positions)
    if kind == "difference":
        w = w * difference_taper(w.size)
    elif w.size % 2:
        raise ValueError(f"monopulse axis needs an even length, got {w.size}")
    return w


def axis_phase(cfg: RadarConfig, axis: str, elevation=0.0, azimuth=0.0, range_m=0.0) -> np.ndarray:
    """Per-element phase step along ``axis`` for a source at the given coordinates.

    The range axis uses the compensated manifold, so only ``range_m`` matters.
    """
    if axis == "elevation":
        return vertical_phase(cfg, elevation, 0.0)
    if axis == "azimuth":
        return horizontal_phase(cfg, np.cos(elevation) * np.sin(azimuth))
    if axis == "range":
        return _range_step(cfg, range_m)
    raise ValueError(f"unknown axis {axis!r}; expected one of {AXES}")


def axis_pattern(weights: np.ndarray, phase, positions=None) -> np.ndarray:
    """Response ``w^H a`` of a line of elements to phase steps ``phase`` (broadcast)."""
    w = np.asarray(weights)
    pos = _positions(w.size, positions)
    phase = np.asarray(phase, dtype=float)
    manifold = np.exp(1j * np.multiply.outer(phase, pos))
    return manifold @ w.conj()
