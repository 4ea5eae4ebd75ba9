"""One Monte-Carlo trial: synthesize, suppress jamming, estimate (theta, phi, R).

Angles and range come from two dwells. The angle dwell runs with the time
shift switched off, so the vertical manifold carries elevation only. When
the configuration has a positive time shift a second (range) dwell is
drawn; it is compensated with the estimated elevation and processed in the
azimuth-range plane. With ``time_shift == 0`` there is no range estimate.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from . import four_channel as fc
from . import row_column as rc
from .array_model import RadarConfig, Steer
from .monopulse import DEFAULT_GUARD, Estimate, estimate_from_ratios
from .scene import Emitter, SeedLike, synthesize

ALGORITHMS = ("four_channel", "row_column")
DEFAULT_SNAPSHOTS = 512


@dataclass(frozen=True)
class Scenario:
    """Everything a trial needs apart from the seed."""

    cfg: RadarConfig
    emitters: Tuple[Emitter, ...]
    steer: Steer
    algorithm: str = "four_channel"
    partition: rc.SubarrayPartition = field(default_factory=lambda: rc.SubarrayPartition(4, 4))
    snapshots: int = DEFAULT_SNAPSHOTS
    loading: float = rc.DEFAULT_LOADING
    guard: float = DEFAULT_GUARD
    weight_mode: str = "independent"

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}")
        if self.snapshots < 2:
            raise ValueError("need at least two snapshots")
        if self.weight_mode not in rc.WEIGHT_MODES:
            raise ValueError(f"unknown weight mode {self.weight_mode!r}; expected one of {rc.WEIGHT_MODES}")
        if self.loading < 0:
            raise ValueError("diagonal loading must be non-negative")
        if not 0 < self.guard <= 1:
            raise ValueError("window guard must lie in (0, 1]")
        object.__setattr__(self, "emitters", tuple(self.emitters))
        if self.algorithm == "row_column":
            self.partition.validate(self.cfg)

    @property
    def target(self) -> Optional[Emitter]:
        return next((e for e in self.emitters if e.kind == "target"), None)

    @property
    def jammers(self) -> Tuple[Emitter, ...]:
        return tuple(e for e in self.emitters if e.kind == "jammer")

    def with_target(self, **changes) -> "Scenario":
        """Copy with the target's fields replaced (``power_db``, ``direction``, ...)."""
        emitters = tuple(replace(e, **changes) if e.kind == "target" else e for e in self.emitters)
        return replace(self, emitters=emitters)

    def with_cfg(self, cfg: RadarConfig) -> "Scenario":
        return replace(self, cfg=cfg)

    @property
    def angle_cfg(self) -> RadarConfig:
        return self.cfg.with_time_shift(0.0)

    @property
    def measures_range(self) -> bool:
        return self.cfg.time_shift > 0


@dataclass(frozen=True)
class BeamPair:
    """Element-level weights of one axis' monopulse pair, adaptive and quiescent.

    ``plane`` names the manifold the weights act on: the angle plane for
    elevation and azimuth, the compensated azimuth-range plane for range.
    """

    axis: str
    plane: str
    adaptive_sum: np.ndarray
    adaptive_diff: np.ndarray
    quiescent_sum: np.ndarray
    quiescent_diff: np.ndarray
    cfg: RadarConfig


@dataclass(frozen=True)
class TrialResult:
    estimate: Estimate
    ratios: Dict[str, complex]
    beams: Dict[str, BeamPair] = field(default_factory=dict)


def dwell_seeds(seed: SeedLike) -> Tuple[np.random.SeedSequence, np.random.SeedSequence]:
    """Independent child streams for the angle and range dwells."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    angle, rng = ss.spawn(2)
    return angle, rng


def _four_channel(scn: Scenario, batch, plane: str, elevation: Optional[float], keep: bool):
    out = fc.quadrant_beams(batch, scn.steer, plane, compensation_elevation=elevation)
    w = fc.estimate_cancellation_weights(out)
    ratios = fc.adaptive_ratio(fc.adaptive_beams(out, w))
    beams = {}
    if keep:
        diff_name = {"azimuth": "dA", "elevation": "dE", "range": "dE"}
        for axis, (a_sum, a_diff) in fc.adaptive_element_weights(out, w).items():
            beams[axis] = BeamPair(axis, plane, a_sum, a_diff, out.weights["sum"],
                                   out.weights[diff_name[axis]], batch.cfg)
    return ratios, beams


def _row_column(scn: Scenario, batch, plane: str, elevation: Optional[float], keep: bool):
    sub = rc.subarray_outputs(batch, scn.partition, scn.steer, plane, elevation)
    rows = rc.row_weight_set(sub, scn.steer, scn.loading, scn.weight_mode)
    if plane == "azimuth_elevation":
        cols = rc.column_weight_set(sub, scn.steer, scn.loading, scn.weight_mode)
        weights = rc.MvdrWeights(rows, cols)
        beams = rc.monopulse_beams(rc.adaptive_axis_beams(sub, weights), batch.cfg, scn.partition, scn.steer)
    else:
        weights = rc.MvdrWeights(rows, None, rows)
        x_r = np.einsum("iq,kiq->ki", rows.conj(), sub.data)
        beams = rc.monopulse_beams(rc.AdaptiveAxisBeams(None, None, x_r), batch.cfg, scn.partition, scn.steer)
    ratios = fc.adaptive_ratio(beams)
    pairs = {}
    if keep:
        quiet = rc.conventional_weights(sub, scn.steer)
        if plane == "azimuth_elevation":
            adaptive = rc.element_weights(sub, weights, scn.steer)
            quiescent = rc.element_weights(sub, quiet, scn.steer)
        else:
            adaptive = rc.element_weights(sub, weights, scn.steer, range_sub=sub)
            quiescent = rc.element_weights(sub, rc.MvdrWeights(quiet.rows, None, quiet.rows), scn.steer, sub)
        for axis in adaptive:
            pairs[axis] = BeamPair(axis, plane, *adaptive[axis], *quiescent[axis], batch.cfg)
    return ratios, pairs


def run_trial(scn: Scenario, seed: SeedLike, keep_weights: bool = False) -> TrialResult:
    """Estimate target parameters from one pair of dwells.

    Args:
        scn: Scenario to simulate.
        seed: Integer or SeedSequence; the two dwells use child streams.
        keep_weights: Also return element-level adaptive and quiescent
            weights per axis (for beampatterns and ratio curves).

    Raises:
        ValueError: degenerate data (vanishing sum beam, bad weights).
        SingularCovarianceError: MVDR covariance not invertible.
    """
    process = _four_channel if scn.algorithm == "four_channel" else _row_column
    angle_seed, range_seed = dwell_seeds(seed)
    angle_batch = synthesize(scn.angle_cfg, scn.emitters, scn.snapshots, angle_seed)
    ratios, beams = process(scn, angle_batch, "azimuth_elevation", None, keep_weights)
    est = estimate_from_ratios(scn.angle_cfg, scn.steer, ratios, scn.guard)
    if scn.measures_range:
        range_batch = synthesize(scn.cfg, scn.emitters, scn.snapshots, range_seed)
        r, b = process(scn, range_batch, "azimuth_range", est.elevation, keep_weights)
        ratios, beams = {**ratios, **r}, {**beams, **b}
        est = estimate_from_ratios(scn.cfg, scn.steer, ratios, scn.guard)
    return TrialResult(est, ratios, beams)


def estimate_errors(scn: Scenario, est: Estimate) -> Dict[str, float]:
    """Signed estimation errors (rad, rad, m) against the scenario target."""
    tgt = scn.target
    if tgt is None:
        raise ValueError("scenario has no target")
    err = {"elevation": est.elevation - tgt.direction.elevation, "azimuth": est.azimuth - tgt.direction.azimuth}
    if est.range is not None:
        err["range"] = est.range - tgt.range
    return err


def table2_emitters(include: Sequence[str] = ("target", "MLJ1", "MLJ2", "SLJ")) -> Tuple[Emitter, ...]:
    """Reference target and jammers (azimuth, elevation in degrees; range in meters)."""
    from .array_model import Direction

    table = {
        "target": ("target", 0.5, 0.5, 75.15e3, 10.0),
        "MLJ1": ("jammer", 3.0, -3.0, 75.3e3, 40.0),
        "MLJ2": ("jammer", -3.0, 3.0, 74.6e3, 40.0),
        "SLJ": ("jammer", 8.0, -6.0, 80.8e3, 40.0),
    }
    out = []
    for name in include:
        kind, az, el, r, p = table[name]
        out.append(Emitter(kind, Direction.from_degrees(az, el), r, p, name))
    return tuple(out)


REFERENCE_STEER = Steer.from_degrees(0.0, 0.0, 75.1e3)


def table2_scenario(algorithm: str = "four_channel", include: Optional[Sequence[str]] = None,
                    **kwargs) -> Scenario:
    """Reference scene.

    By default the four-channel algorithm sees the target and MLJ1, the
    row-column algorithm all four emitters; ``include`` overrides the list.
    """
    if include is None:
        include = ("target", "MLJ1") if algorithm == "four_channel" else ("target", "MLJ1", "MLJ2", "SLJ")
    return Scenario(RadarConfig(), table2_emitters(include), REFERENCE_STEER, algorithm, **kwargs)
