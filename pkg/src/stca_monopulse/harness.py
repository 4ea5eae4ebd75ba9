"""Monte-Carlo RMSE sweeps over SNR or target azimuth, with radar baselines.

Every trial draws from its own substream, ``SeedSequence(seed,
spawn_key=(sweep_index, trial_index))``, so a report depends only on the
spec and never on scheduling. Baselines reuse the same substreams, which
makes their comparison paired.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np

from .array_model import Direction, RadarConfig
from .pipeline import Scenario, estimate_errors, run_trial
from .row_column import SingularCovarianceError
from .scene import RNG_ALGORITHM

BASELINES = ("stca", "mimo", "phased_array")
SWEEPS = ("snr", "offset")


def baseline_model(kind: str, cfg: RadarConfig) -> RadarConfig:
    """Radar variant used by a baseline.

    ``stca`` keeps ``cfg``; ``mimo`` switches the time shift off; the
    ``phased_array`` model also drops to a one-way vertical phase, which
    halves the elevation slope of the monopulse curve.
    """
    if kind == "stca":
        return cfg
    if kind == "mimo":
        return cfg.with_time_shift(0.0)
    if kind == "phased_array":
        return replace(cfg, time_shift=0.0, two_way_elevation=False)
    raise ValueError(f"unknown baseline {kind!r}; expected one of {BASELINES}")


@dataclass(frozen=True)
class ExperimentSpec:
    """A sweep of Monte-Carlo points.

    ``values`` are target SNRs in dB for ``sweep='snr'`` and target azimuths
    in degrees for ``sweep='offset'``.
    """

    scenario: Scenario
    sweep: str
    values: Tuple[float, ...]
    trials: int = 1000
    seed: int = 0
    baseline: str = "stca"
    workers: int = 1

    def __post_init__(self):
        if self.sweep not in SWEEPS:
            raise ValueError(f"unknown sweep {self.sweep!r}; expected one of {SWEEPS}")
        if self.trials < 1:
            raise ValueError("need at least one trial per point")
        if len(self.values) == 0:
            raise ValueError("sweep must be non-empty")
        if self.baseline not in BASELINES:
            raise ValueError(f"unknown baseline {self.baseline!r}; expected one of {BASELINES}")
        if self.scenario.target is None:
            raise ValueError("scenario has no target")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def point_scenario(self, value: float) -> Scenario:
        scn = self.scenario.with_cfg(baseline_model(self.baseline, self.scenario.cfg))
        if self.sweep == "snr":
            return scn.with_target(power_db=value)
        el = scn.target.direction.elevation
        return scn.with_target(direction=Direction(np.deg2rad(value), el))


@dataclass(frozen=True)
class SweepPoint:
    """Aggregated errors at one sweep value; RMSEs cover valid trials only."""

    value: float
    rmse_elevation_deg: float
    rmse_azimuth_deg: float
    rmse_range_m: Optional[float]
    valid_trials: int
    trials: int
    se_elevation_deg: float
    se_azimuth_deg: float
    se_range_m: Optional[float]

    @property
    def flagged(self) -> bool:
        return self.valid_trials == 0


@dataclass(frozen=True)
class RmseReport:
    sweep: str
    baseline: str
    algorithm: str
    trials: int
    seed: int
    points: Tuple[SweepPoint, ...]
    rng_algorithm: str = RNG_ALGORITHM

    def column(self, name: str) -> np.ndarray:
        return np.array([np.nan if getattr(p, name) is None else getattr(p, name) for p in self.points], float)


def trial_seed(seed: int, sweep_index: int, trial_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(sweep_index, trial_index))


def _one(args) -> Optional[Tuple[float, float, Optional[float]]]:
    scn, seed = args
    try:
        result = run_trial(scn, seed)
    except (ValueError, SingularCovarianceError):
        return None
    if not result.estimate.all_valid:
        return None
    err = estimate_errors(scn, result.estimate)
    return err["elevation"], err["azimuth"], err.get("range")


def _rmse(errors: np.ndarray) -> Tuple[float, float]:
    """RMSE and its delta-method standard error."""
    if errors.size == 0:
        return float("nan"), float("nan")
    sq = errors ** 2
    rmse = float(np.sqrt(sq.mean()))
    if errors.size < 2 or rmse == 0:
        return rmse, 0.0
    return rmse, float(sq.std(ddof=1) / (2.0 * rmse * np.sqrt(errors.size)))


def _aggregate(value: float, outcomes: List, trials: int, measures_range: bool) -> SweepPoint:
    ok = [o for o in outcomes if o is not None]
    el = np.rad2deg(np.array([o[0] for o in ok], float))
    az = np.rad2deg(np.array([o[1] for o in ok], float))
    r_el, se_el = _rmse(el)
    r_az, se_az = _rmse(az)
    r_r = se_r = None
    if measures_range:
        r_r, se_r = _rmse(np.array([o[2] for o in ok], float))
    return SweepPoint(value, r_el, r_az, r_r, len(ok), trials, se_el, se_az, se_r)


def run_sweep(spec: ExperimentSpec) -> RmseReport:
    """Run every point of ``spec``; trials may be spread over worker processes."""
    jobs = []
    scenarios = [spec.point_scenario(v) for v in spec.values]
    for i, scn in enumerate(scenarios):
        jobs.extend((scn, trial_seed(spec.seed, i, l)) for l in range(spec.trials))
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            outcomes = list(pool.map(_one, jobs, chunksize=max(1, spec.trials // 4)))
    else:
        outcomes = [_one(j) for j in jobs]
    points = []
    for i, (v, scn) in enumerate(zip(spec.values, scenarios)):
        chunk = outcomes[i * spec.trials:(i + 1) * spec.trials]
        points.append(_aggregate(v, chunk, spec.trials, scn.measures_range))
    return RmseReport(spec.sweep, spec.baseline, spec.scenario.algorithm, spec.trials, spec.seed, tuple(points))


def run_rmse_vs_snr(spec: ExperimentSpec) -> RmseReport:
    if spec.sweep != "snr":
        raise ValueError("spec is not an SNR sweep")
    return run_sweep(spec)


def run_rmse_vs_offset(spec: ExperimentSpec) -> RmseReport:
    if spec.sweep != "offset":
        raise ValueError("spec is not an offset sweep")
    return run_sweep(spec)
