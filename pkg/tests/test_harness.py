import numpy as np
import pytest

from stca_monopulse import harness as h
from stca_monopulse.array_model import Direction, RadarConfig, full_steering
from stca_monopulse.pipeline import estimate_errors, run_trial, table2_scenario


def test_baseline_models(cfg):
    assert h.baseline_model("stca", cfg) is cfg
    assert h.baseline_model("mimo", cfg).time_shift == 0.0
    assert h.baseline_model("mimo", cfg).two_way_elevation
    pa = h.baseline_model("phased_array", cfg)
    assert pa.time_shift == 0.0 and not pa.two_way_elevation
    with pytest.raises(ValueError):
        h.baseline_model("sonar", cfg)


def test_phased_array_vertical_phase_is_one_way(cfg):
    pa = h.baseline_model("phased_array", cfg)
    d = Direction.from_degrees(0.0, 2.0)
    a = full_steering(pa, d, 5e4)
    assert np.angle(a[cfg.cols]) == pytest.approx(2 * np.pi * cfg.spacing_ratio * np.sin(d.elevation))


@pytest.mark.parametrize("kwargs", [dict(sweep="doppler"), dict(trials=0), dict(values=()), dict(baseline="x")])
def test_spec_validation(kwargs):
    base = dict(scenario=table2_scenario(), sweep="snr", values=(0.0,))
    base.update(kwargs)
    with pytest.raises(ValueError):
        h.ExperimentSpec(**base)
    with pytest.raises(ValueError):
        h.ExperimentSpec(table2_scenario(include=("MLJ1",)), "snr", (0.0,))


def test_spec_defaults():
    spec = h.ExperimentSpec(table2_scenario(), "snr", [0, 5])
    assert spec.trials == 1000 and spec.values == (0.0, 5.0)


def test_point_scenario():
    spec = h.ExperimentSpec(table2_scenario(), "offset", (1.5,), baseline="mimo")
    scn = spec.point_scenario(1.5)
    assert scn.target.direction.azimuth == pytest.approx(np.deg2rad(1.5))
    assert scn.target.direction.elevation == table2_scenario().target.direction.elevation
    assert scn.cfg.time_shift == 0.0
    snr = h.ExperimentSpec(table2_scenario(), "snr", (3.0,)).point_scenario(3.0)
    assert snr.target.power_db == 3.0


def test_trial_seed_derivation():
    a = h.trial_seed(7, 1, 2).generate_state(4)
    assert np.array_equal(a, h.trial_seed(7, 1, 2).generate_state(4))
    assert not np.array_equal(a, h.trial_seed(7, 2, 1).generate_state(4))


def test_single_trial_report_matches_run_trial():
    scn = table2_scenario("row_column")
    rep = h.run_sweep(h.ExperimentSpec(scn, "snr", (10.0,), trials=1, seed=3))
    err = estimate_errors(scn, run_trial(scn.with_target(power_db=10.0), h.trial_seed(3, 0, 0)).estimate)
    p = rep.points[0]
    assert p.valid_trials == 1
    assert p.rmse_elevation_deg == pytest.approx(abs(np.rad2deg(err["elevation"])), rel=1e-12)
    assert p.rmse_azimuth_deg == pytest.approx(abs(np.rad2deg(err["azimuth"])), rel=1e-12)
    assert p.rmse_range_m == pytest.approx(abs(err["range"]), rel=1e-12)


def test_parallel_matches_serial():
    spec = h.ExperimentSpec(table2_scenario(), "snr", (0.0, 10.0), trials=4, seed=1)
    serial = h.run_sweep(spec)
    from dataclasses import replace
    parallel = h.run_sweep(replace(spec, workers=2))
    assert serial == parallel


def test_mimo_range_absent():
    rep = h.run_sweep(h.ExperimentSpec(table2_scenario(), "snr", (10.0,), trials=3, baseline="mimo"))
    assert rep.points[0].rmse_range_m is None
    assert np.isnan(rep.column("rmse_range_m")[0])


def test_all_invalid_point_flagged():
    from stca_monopulse.monopulse import window
    scn = table2_scenario()
    # target on the first sum-pattern null: the ratio diverges
    edge = float(np.rad2deg(window(scn.cfg, scn.steer, "azimuth")))
    rep = h.run_sweep(h.ExperimentSpec(scn, "offset", (edge,), trials=3))
    p = rep.points[0]
    assert p.valid_trials == 0 and p.flagged
    assert np.isnan(p.rmse_elevation_deg)


def test_rmse_standard_error():
    e = np.array([1.0, -2.0, 2.0, 0.5])
    rmse, se = h._rmse(e)
    assert rmse == pytest.approx(np.sqrt(np.mean(e ** 2)))
    assert se == pytest.approx(np.std(e ** 2, ddof=1) / (2 * rmse * 2))
    assert np.isnan(h._rmse(np.array([]))[0])


def test_high_snr_beats_low_snr():
    rep = h.run_sweep(h.ExperimentSpec(table2_scenario("row_column"), "snr", (0.0, 30.0), trials=20, seed=4))
    lo, hi = rep.points
    assert hi.rmse_elevation_deg < lo.rmse_elevation_deg
    assert hi.rmse_azimuth_deg < lo.rmse_azimuth_deg
    assert hi.rmse_range_m < lo.rmse_range_m
    assert lo.valid_trials >= 19


def _offset_scene():
    return table2_scenario("row_column", include=("target", "MLJ1", "MLJ2"))


def test_offset_near_jammer_worse_than_boresight():
    rep = h.run_sweep(h.ExperimentSpec(_offset_scene(), "offset", (0.0, 2.5), trials=50, seed=2))
    assert rep.points[1].rmse_elevation_deg > rep.points[0].rmse_elevation_deg


def test_symmetric_offsets_agree():
    scn = _offset_scene().with_target(direction=Direction(0.0, 0.0))
    rep = h.run_sweep(h.ExperimentSpec(scn, "offset", (-1.0, 1.0), trials=100, seed=1))
    a, b = rep.points
    for name in ("elevation", "azimuth"):
        ra, rb = getattr(a, f"rmse_{name}_deg"), getattr(b, f"rmse_{name}_deg")
        sa, sb = getattr(a, f"se_{name}_deg"), getattr(b, f"se_{name}_deg")
        assert abs(ra - rb) <= 3 * np.hypot(sa, sb)


def _noise_gain(scn):
    """||w_diff|| / |w_sum^H a_target| per axis: scales the ratio noise."""
    from stca_monopulse.array_model import horizontal_steering, range_steering
    res = run_trial(scn, 3, keep_weights=True)
    tgt = scn.target
    out = {}
    for axis, pair in res.beams.items():
        if axis == "range":
            a = np.kron(range_steering(pair.cfg, tgt.range), horizontal_steering(pair.cfg, tgt.direction))
        else:
            a = full_steering(pair.cfg, tgt.direction, tgt.range)
        out[axis] = np.linalg.norm(pair.adaptive_diff) / abs(np.vdot(pair.adaptive_sum, a))
    return out


def test_jammed_rmse_tracks_noise_gain():
    """With jammers nulled, RMSE differs from the jammer-free level only by the beams' noise gain."""
    jammed = _offset_scene().with_target(direction=Direction(0.0, 0.0))
    free = table2_scenario("row_column", include=("target",)).with_target(direction=Direction(0.0, 0.0))
    reps = [h.run_sweep(h.ExperimentSpec(s, "offset", (0.0,), trials=150, seed=9)).points[0]
            for s in (jammed, free)]
    gains = [_noise_gain(s) for s in (jammed, free)]
    for axis, unit in (("elevation", "deg"), ("azimuth", "deg"), ("range", "m")):
        r = [getattr(p, f"rmse_{axis}_{unit}") for p in reps]
        se = [getattr(p, f"se_{axis}_{unit}") for p in reps]
        measured = r[0] / r[1]
        rel_se = np.hypot(se[0] / r[0], se[1] / r[1])
        predicted = gains[0][axis] / gains[1][axis]
        assert abs(measured / predicted - 1) <= 3 * rel_se, axis
