"""Beampattern grids, one-dimensional cuts and null-depth measurement.

Patterns are ``|w^H v|^2`` in dB, normalised to the grid peak and floored
at -100 dB. Weights are element-level vectors in row-major order; adaptive
beams are handled through their composite element weights, which is the
same as applying the scalar cancellation weight to quiescent patterns.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .array_model import RadarConfig, axis_phase, horizontal_phase, vertical_phase

FLOOR_DB = -100.0
PLANES = ("azimuth_elevation", "uv", "azimuth_range")
AXIS_NAMES = {
    "azimuth_elevation": ("azimuth", "elevation"),
    "uv": ("u", "v"),
    "azimuth_range": ("azimuth", "range"),
}

WeightsLike = Union[np.ndarray, Tuple[np.ndarray, np.ndarray, complex]]


@dataclass(frozen=True)
class PatternGrid:
    """Pattern samples ``values[i, j]`` at ``(axis1[i], axis2[j])`` in dB.

    Angles are in radians, range in meters.
    """

    axis1: np.ndarray
    axis2: np.ndarray
    values: np.ndarray
    plane: str
    label: str = ""

    @property
    def axis_names(self) -> Tuple[str, str]:
        return AXIS_NAMES[self.plane]

    @property
    def peak(self) -> float:
        return float(np.max(self.values))


@dataclass(frozen=True)
class PatternCut:
    """One row or column of a grid; ``values`` keep the grid normalisation."""

    axis: np.ndarray
    values: np.ndarray
    axis_name: str
    fixed_name: str
    fixed_value: float
    label: str = ""

    @property
    def peak(self) -> float:
        return float(np.max(self.values))


def angle_axis(span_deg: float = 10.0, step_deg: float = 0.05, center_deg: float = 0.0) -> np.ndarray:
    """Symmetric angle samples in radians, ``center +/- span`` at ``step`` (degrees)."""
    if step_deg <= 0 or span_deg < 0:
        raise ValueError("angle grid needs a positive step and non-negative span")
    count = int(round(2 * span_deg / step_deg)) + 1
    return np.deg2rad(center_deg - span_deg + step_deg * np.arange(count))


def range_axis(center: float, span: float = 600.0, step: float = 1.0) -> np.ndarray:
    """Range samples ``center +/- span`` at ``step`` meters."""
    if step <= 0 or span < 0:
        raise ValueError("range grid needs a positive step and non-negative span")
    count = int(round(2 * span / step)) + 1
    return center - span + step * np.arange(count)


def composite_weights(main: np.ndarray, aux: np.ndarray, w: complex) -> np.ndarray:
    """Element weights of the adaptive beam ``f_main - w f_aux``."""
    return np.asarray(main) - np.conj(w) * np.asarray(aux)


def _resolve(weights: WeightsLike) -> np.ndarray:
    if isinstance(weights, tuple):
        return composite_weights(*weights)
    return np.asarray(weights)


def _phases(cfg: RadarConfig, plane: str, x1, x2, elevation: float):
    if plane == "azimuth_elevation":
        return (horizontal_phase(cfg, np.cos(x2) * np.sin(x1)),
                vertical_phase(cfg, x2, 0.0) + 0.0 * x1)
    if plane == "uv":
        way = cfg.elevation_way
        return horizontal_phase(cfg, x1) + 0.0 * x2, way * 2.0 * np.pi * cfg.spacing_ratio * x2 + 0.0 * x1
    if plane == "azimuth_range":
        return (horizontal_phase(cfg, np.cos(elevation) * np.sin(x1)) + 0.0 * x2,
                axis_phase(cfg, "range", range_m=x2) + 0.0 * x1)
    raise ValueError(f"unknown plane {plane!r}; expected one of {PLANES}")


def response(cfg: RadarConfig, weights: WeightsLike, plane: str, x1, x2, elevation: float = 0.0) -> np.ndarray:
    """Complex response ``w^H v`` at every pair of broadcast coordinates.

    Args:
        cfg: Radar configuration.
        weights: Element weights (length M*N) or a ``(main, aux, w)`` triple.
        plane: ``azimuth_elevation`` (rad, rad), ``uv`` (direction cosines)
            or ``azimuth_range`` (rad, m) on elevation-compensated data.
        x1, x2: Coordinates, broadcast against each other.
        elevation: Elevation (rad) used for the azimuth-range plane.
    """
    w = _resolve(weights)
    if w.size != cfg.num_elements:
        raise ValueError(f"weight length {w.size} does not match {cfg.num_elements} elements")
    x1, x2 = np.broadcast_arrays(np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
    ph, pv = _phases(cfg, plane, x1, x2, elevation)
    wc = w.reshape(cfg.rows, cfg.cols).conj()
    horiz = np.exp(1j * ph[..., None] * np.arange(cfg.cols))
    vert = np.exp(1j * pv[..., None] * np.arange(cfg.rows))
    return np.einsum("...n,mn,...m->...", horiz, wc, vert)


def to_db(power: np.ndarray, reference: float, floor_db: float = FLOOR_DB) -> np.ndarray:
    with np.errstate(divide="ignore"):
        db = 10.0 * np.log10(np.asarray(power) / reference)
    return np.maximum(db, floor_db)


def evaluate(cfg: RadarConfig, weights: WeightsLike, plane: str, axis1, axis2,
             label: str = "", elevation: float = 0.0, floor_db: float = FLOOR_DB) -> PatternGrid:
    """Pattern over the outer product of ``axis1`` and ``axis2``, peak at 0 dB."""
    axis1, axis2 = np.atleast_1d(np.asarray(axis1, float)), np.atleast_1d(np.asarray(axis2, float))
    if axis1.size == 0 or axis2.size == 0:
        raise ValueError("pattern grid must be non-empty")
    power = np.abs(response(cfg, weights, plane, axis1[:, None], axis2[None, :], elevation)) ** 2
    peak = power.max()
    if not peak > 0:
        raise ValueError("pattern is identically zero on the grid")
    return PatternGrid(axis1, axis2, to_db(power, peak, floor_db), plane, label)


def _nearest(samples: np.ndarray, value: float, name: str) -> int:
    if samples.size > 1:
        step = np.min(np.abs(np.diff(samples)))
        lo, hi = samples.min() - 0.5 * step, samples.max() + 0.5 * step
    else:
        lo = hi = samples[0]
        step = 0.0
    if not lo - 1e-12 <= value <= hi + 1e-12:
        raise ValueError(f"{name} = {value:.6g} lies outside the grid [{samples.min():.6g}, {samples.max():.6g}]")
    return int(np.argmin(np.abs(samples - value)))


def cut(grid: PatternGrid, axis: str, fixed_value: float) -> PatternCut:
    """Series along ``axis`` at the grid sample nearest ``fixed_value`` on the other axis."""
    n1, n2 = grid.axis_names
    if axis == n1:
        j = _nearest(grid.axis2, fixed_value, n2)
        return PatternCut(grid.axis1, grid.values[:, j], n1, n2, float(grid.axis2[j]), grid.label)
    if axis == n2:
        i = _nearest(grid.axis1, fixed_value, n1)
        return PatternCut(grid.axis2, grid.values[i, :], n2, n1, float(grid.axis1[i]), grid.label)
    raise ValueError(f"axis {axis!r} is not one of {grid.axis_names}")


def null_depth(pattern: Union[PatternGrid, PatternCut], location) -> float:
    """Pattern value at the nearest sample to ``location`` minus the pattern peak (dB).

    ``location`` is ``(axis1, axis2)`` for a grid and a scalar for a cut.
    """
    if isinstance(pattern, PatternCut):
        k = _nearest(pattern.axis, float(location), pattern.axis_name)
        return float(pattern.values[k] - pattern.peak)
    x1, x2 = location
    i = _nearest(pattern.axis1, float(x1), pattern.axis_names[0])
    j = _nearest(pattern.axis2, float(x2), pattern.axis_names[1])
    return float(pattern.values[i, j] - pattern.peak)


def mainlobe_deviation(adaptive: PatternCut, quiescent: PatternCut, mainlobe_db: float = -10.0) -> float:
    """Largest |difference| (dB) between two cuts over the quiescent mainlobe.

    Both cuts are first normalised to their own peaks; the mainlobe is the
    contiguous region around the quiescent peak that stays above
    ``mainlobe_db``.
    """
    if adaptive.axis.shape != quiescent.axis.shape or not np.allclose(adaptive.axis, quiescent.axis):
        raise ValueError("cuts are sampled on different axes")
    a = adaptive.values - adaptive.peak
    q = quiescent.values - quiescent.peak
    k = int(np.argmax(q))
    lo = k
    while lo > 0 and q[lo - 1] >= mainlobe_db:
        lo -= 1
    hi = k
    while hi < q.size - 1 and q[hi + 1] >= mainlobe_db:
        hi += 1
    return float(np.max(np.abs(a[lo:hi + 1] - q[lo:hi + 1])))


def suppression_db(cfg: RadarConfig, adaptive: WeightsLike, quiescent: WeightsLike, plane: str,
                   look, location, elevation: float = 0.0) -> float:
    """Jammer suppression of an adaptive beam relative to its quiescent counterpart.

    Each beam's gain toward ``location`` is referenced to its own gain toward
    ``look`` (both ``(x1, x2)`` pairs); the result is the quiescent relative
    gain minus the adaptive relative gain, in dB. Positive means suppressed.
    """
    def rel(w):
        g_look = np.abs(response(cfg, w, plane, *look, elevation=elevation)) ** 2
        g_loc = np.abs(response(cfg, w, plane, *location, elevation=elevation)) ** 2
        return 10.0 * np.log10(max(float(g_loc), 1e-300) / float(g_look))

    return rel(quiescent) - rel(adaptive)
