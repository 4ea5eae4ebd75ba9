"""Quadrant sum/difference beams with delta-delta assisted jamming cancellation.

The array is split into four quadrants (upper-left, lower-left, upper-right,
lower-right; "upper" is the first half of the rows, "left" the first half
of the columns). Their steered outputs combine into a sum beam, two
difference beams and a delta-delta beam. A single mainlobe jammer is then
cancelled along one axis with a scalar weight, which leaves the sum and
difference patterns along the other axis untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from .array_model import RadarConfig, Steer, axis_steering, elevation_compensation, range_steering
from .scene import SnapshotBatch

PLANES = ("azimuth_elevation", "azimuth_range")
WEIGHT_LIMIT = 1e6


@dataclass(frozen=True)
class FourChannelOutput:
    """Quiescent channel series over K snapshots.

    In the azimuth-range plane ``f_dE`` carries the range-difference beam.
    ``weights`` maps channel name to its element-level weight vector in the
    plane's (compensated) coordinates.
    """

    f_sum: np.ndarray
    f_dA: np.ndarray
    f_dE: np.ndarray
    f_dd: np.ndarray
    plane: str
    weights: Dict[str, np.ndarray] = field(default_factory=dict)


@dataclass(frozen=True)
class CancellationWeights:
    """Scalar cancellation weights; ``*2`` entries come from the delta-delta channel."""

    plane: str
    w_a: Optional[complex] = None
    w_a2: Optional[complex] = None
    w_e: Optional[complex] = None
    w_e2: Optional[complex] = None
    w_r: Optional[complex] = None
    w_r2: Optional[complex] = None


def _check_plane(plane: str) -> None:
    if plane not in PLANES:
        raise ValueError(f"unknown plane {plane!r}; expected one of {PLANES}")


def quadrant_weights(cfg: RadarConfig, steer: Steer, plane: str = "azimuth_elevation") -> Dict[str, np.ndarray]:
    """Element weights of the four quiescent channels (beam = w^H x)."""
    _check_plane(plane)
    if cfg.rows % 2 or cfg.cols % 2:
        raise ValueError(f"quadrant beams need even dimensions, got {cfg.rows} x {cfg.cols}")
    if plane == "azimuth_elevation":
        w_z = axis_steering(cfg, steer, "elevation")
    else:
        w_z = range_steering(cfg, steer.range)
    w_y = axis_steering(cfg, steer, "azimuth")
    upper = np.where(np.arange(cfg.rows) < cfg.rows // 2, 1.0, -1.0)
    left = np.where(np.arange(cfg.cols) < cfg.cols // 2, 1.0, -1.0)
    return {
        "sum": np.kron(w_z, w_y),
        "dA": np.kron(w_z, w_y * left),
        "dE": np.kron(w_z * upper, w_y),
        "dd": np.kron(w_z * upper, w_y * left),
    }


def compensate(batch: SnapshotBatch, elevation: float) -> np.ndarray:
    """Snapshots with the elevation part of the vertical phase removed, shape (K, M*N)."""
    c = elevation_compensation(batch.cfg, elevation)
    return (batch.as_grid() * c[None, :, None]).reshape(batch.num_snapshots, -1)


def quadrant_beams(batch: SnapshotBatch, steer: Steer, plane: str = "azimuth_elevation",
                   compensation_elevation: Optional[float] = None) -> FourChannelOutput:
    """Form the sum, delta-azimuth, delta-elevation (or delta-range) and delta-delta beams.

    Args:
        batch: Snapshots to beamform.
        steer: Beam pointing.
        plane: ``azimuth_elevation`` or ``azimuth_range``.
        compensation_elevation: Elevation (rad) used to compensate the
            vertical phase; required for the azimuth-range plane.
    """
    _check_plane(plane)
    cfg = batch.cfg
    if plane == "azimuth_range":
        if cfg.time_shift <= 0:
            raise ValueError("azimuth-range processing needs a positive time shift")
        if compensation_elevation is None:
            raise ValueError("azimuth-range processing needs an elevation to compensate")
        data = compensate(batch, compensation_elevation)
    else:
        data = batch.data
    w = quadrant_weights(cfg, steer, plane)
    out = {name: data @ vec.conj() for name, vec in w.items()}
    return FourChannelOutput(out["sum"], out["dA"], out["dE"], out["dd"], plane, w)


def _ratio(num: np.ndarray, den: np.ndarray, centered: bool) -> complex:
    if centered:
        num, den = num - num.mean(), den - den.mean()
    cross = np.mean(num * den.conj())
    power = np.mean(np.abs(den) ** 2)
    if not power > 0:
        raise ValueError("auxiliary channel carries no power; cannot estimate cancellation weight")
    w = complex(cross / power)
    if not np.isfinite(w) or abs(w) > WEIGHT_LIMIT:
        raise ValueError(f"cancellation weight out of range: {w}")
    return w


def estimate_cancellation_weights(out: FourChannelOutput, centered: bool = True) -> CancellationWeights:
    """Sample estimates of the cancellation weights from the quiescent channels.

    Args:
        out: Quiescent channel series.
        centered: Remove each channel's batch mean before forming the
            second-order statistics. The target echo is constant over the
            batch, so this keeps it out of the weights; the jammer is
            zero-mean and unaffected.
    """
    if out.f_sum.size < 2:
        raise ValueError("need at least two snapshots to estimate weights")
    c = centered
    if out.plane == "azimuth_elevation":
        return CancellationWeights(
            plane=out.plane,
            w_a=_ratio(out.f_sum, out.f_dE, c),
            w_a2=_ratio(out.f_dA, out.f_dd, c),
            w_e=_ratio(out.f_sum, out.f_dA, c),
            w_e2=_ratio(out.f_dE, out.f_dd, c),
        )
    return CancellationWeights(
        plane=out.plane,
        w_r=_ratio(out.f_sum, out.f_dA, c),
        w_r2=_ratio(out.f_dE, out.f_dd, c),
    )


def _pairs(out: FourChannelOutput, w: CancellationWeights):
    """(axis, main_sum, aux_sum, main_diff, aux_diff, weight) channel name tuples."""
    if w.plane != out.plane:
        raise ValueError("weights and beams come from different planes")
    if out.plane == "azimuth_elevation":
        return [
            ("azimuth", "sum", "dE", "dA", "dd", w.w_a),
            ("elevation", "sum", "dA", "dE", "dd", w.w_e),
        ]
    return [("range", "sum", "dA", "dE", "dd", w.w_r)]


def adaptive_beams(out: FourChannelOutput, w: CancellationWeights) -> Dict[str, Tuple[np.ndarray, np.ndarray]]:
    """Adaptive (sum, difference) series per axis.

    The azimuth pair cancels the jammer along elevation, the elevation and
    range pairs cancel it along azimuth.
    """
    series = {"sum": out.f_sum, "dA": out.f_dA, "dE": out.f_dE, "dd": out.f_dd}
    beams = {}
    for axis, ms, xs, md, xd, weight in _pairs(out, w):
        beams[axis] = (series[ms] - weight * series[xs], series[md] - weight * series[xd])
    return beams


def adaptive_element_weights(out: FourChannelOutput, w: CancellationWeights) -> Dict[str, Tuple[np.ndarray, np.ndarray]]:
    """Element-level equivalents of the adaptive beams: ``f - w g = (a - conj(w) b)^H x``."""
    vec = out.weights
    result = {}
    for axis, ms, xs, md, xd, weight in _pairs(out, w):
        result[axis] = (vec[ms] - np.conj(weight) * vec[xs], vec[md] - np.conj(weight) * vec[xd])
    return result


def adaptive_ratio(beams: Dict[str, Tuple[np.ndarray, np.ndarray]]) -> Dict[str, complex]:
    """Monopulse ratio per axis from coherently averaged sum and difference series."""
    ratios = {}
    for axis, (sum_series, diff_series) in beams.items():
        s = np.mean(sum_series)
        scale = np.sqrt(np.mean(np.abs(sum_series) ** 2))
        if not np.isfinite(s) or abs(s) <= 1e-12 * max(scale, np.finfo(float).tiny):
            raise ValueError(f"{axis} sum beam vanishes; ratio undefined")
        ratios[axis] = complex(np.mean(diff_series) / s)
    return ratios
