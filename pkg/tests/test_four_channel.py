import numpy as np
import pytest
from hypothesis import given, strategies as st

from stca_monopulse import four_channel as fc
from stca_monopulse.array_model import Direction, RadarConfig, Steer, axis_pattern, full_steering
from stca_monopulse.pipeline import REFERENCE_STEER, table2_emitters
from stca_monopulse.scene import Emitter, SnapshotBatch, synthesize


def batch_of(cfg, vectors):
    return SnapshotBatch(np.atleast_2d(np.asarray(vectors, complex)), cfg, 0)


def test_target_at_steer_point(cfg, steer):
    c = cfg.with_time_shift(0.0)
    beta = 2.0 - 1.0j
    x = beta * full_steering(c, steer.direction, steer.range)
    out = fc.quadrant_beams(batch_of(c, x), steer)
    for series in (out.f_dA, out.f_dE, out.f_dd):
        assert abs(series[0]) < 1e-9
    assert out.f_sum[0] == pytest.approx(c.num_elements * beta)


def test_off_axis_target_separable(cfg, steer):
    c = cfg.with_time_shift(0.0)
    d = Direction.from_degrees(1.3, -0.7)
    out = fc.quadrant_beams(batch_of(c, full_steering(c, d, 5e4)), steer)
    g_a = axis_pattern(np.ones(c.cols), 2 * np.pi * c.spacing_ratio * d.u)
    g_e = axis_pattern(np.ones(c.rows), 4 * np.pi * c.spacing_ratio * d.v)
    assert out.f_sum[0] == pytest.approx(g_a * g_e, rel=1e-12)


def test_orientation_pinned(cfg, steer):
    """Positive azimuth and elevation offsets give negative imaginary ratios."""
    c = cfg.with_time_shift(0.0)
    x = full_steering(c, Direction.from_degrees(1.0, 1.0), 5e4)
    out = fc.quadrant_beams(batch_of(c, x), steer)
    assert (out.f_dA[0] / out.f_sum[0]).imag < 0
    assert (out.f_dE[0] / out.f_sum[0]).imag < 0


def test_table2_sum_dominated_by_jammer(cfg, steer):
    ems = table2_emitters(("target", "MLJ1"))
    c = cfg.with_time_shift(0.0)
    full = fc.quadrant_beams(synthesize(c, ems, 512, 1), steer)
    target_only = fc.quadrant_beams(synthesize(c, ems[:1], 512, 1, noise_power=0.0), steer)
    assert np.mean(np.abs(full.f_sum) ** 2) > 10 * np.mean(np.abs(target_only.f_sum) ** 2)


def test_input_validation(cfg, steer):
    with pytest.raises(ValueError):
        fc.quadrant_weights(RadarConfig(rows=5, cols=4), steer)
    with pytest.raises(ValueError):
        fc.quadrant_beams(synthesize(cfg, [], 4, 0), steer, plane="bogus")
    with pytest.raises(ValueError):
        fc.quadrant_beams(synthesize(cfg.with_time_shift(0.0), [], 4, 0), steer, "azimuth_range", 0.0)
    with pytest.raises(ValueError):
        fc.quadrant_beams(synthesize(cfg, [], 4, 0), steer, "azimuth_range")


def test_noise_only_weights_small(cfg, steer):
    k = 512
    ws = []
    for seed in range(10):
        w = fc.estimate_cancellation_weights(fc.quadrant_beams(synthesize(cfg, [], k, seed), steer))
        ws.append([w.w_a, w.w_e, w.w_a2, w.w_e2])
    # channels are orthogonal with equal noise gain: E|w|^2 is about 1/K
    assert np.mean(np.abs(np.array(ws)) ** 2) < 5.0 / k


def jammer_scene(cfg, seed=3, k=512):
    j = table2_emitters(("MLJ1",))[0]
    return j, fc.quadrant_beams(synthesize(cfg, [j], k, seed), REFERENCE_STEER)


def test_weights_match_pattern_ratio(cfg):
    c = cfg.with_time_shift(0.0)
    j, out = jammer_scene(c)
    w = fc.estimate_cancellation_weights(out)
    a = full_steering(c, j.direction, j.range)
    g = {k: np.vdot(v, a) for k, v in out.weights.items()}
    assert abs(w.w_a / (g["sum"] / g["dE"]) - 1) < 0.05
    assert abs(w.w_e / (g["sum"] / g["dA"]) - 1) < 0.05


def test_weight_pair_equality(cfg):
    _, out = jammer_scene(cfg.with_time_shift(0.0), seed=4)
    w = fc.estimate_cancellation_weights(out)
    assert abs(w.w_a - w.w_a2) / abs(w.w_a) < 0.1
    assert abs(w.w_e - w.w_e2) / abs(w.w_e) < 0.1


def test_weight_pair_equality_range_plane(cfg):
    j = table2_emitters(("MLJ1",))[0]
    out = fc.quadrant_beams(synthesize(cfg, [j], 512, 6), REFERENCE_STEER, "azimuth_range", j.direction.elevation)
    w = fc.estimate_cancellation_weights(out)
    assert abs(w.w_r - w.w_r2) / abs(w.w_r) < 0.1


def test_degenerate_batches_rejected(cfg, steer):
    with pytest.raises(ValueError):
        fc.estimate_cancellation_weights(fc.quadrant_beams(synthesize(cfg, [], 1, 0), steer))
    zero = batch_of(cfg, np.zeros((4, cfg.num_elements)))
    with pytest.raises(ValueError):
        fc.estimate_cancellation_weights(fc.quadrant_beams(zero, steer))


def test_zero_weights_leave_beams_unchanged(cfg, steer):
    out = fc.quadrant_beams(synthesize(cfg, [], 8, 0), steer)
    beams = fc.adaptive_beams(out, fc.CancellationWeights("azimuth_elevation", 0j, 0j, 0j, 0j))
    assert np.array_equal(beams["azimuth"][0], out.f_sum)
    assert np.array_equal(beams["azimuth"][1], out.f_dA)
    assert np.array_equal(beams["elevation"][1], out.f_dE)


def test_exact_cancellation_noise_free(cfg):
    c = cfg.with_time_shift(0.0)
    j = table2_emitters(("MLJ1",))[0]
    out = fc.quadrant_beams(synthesize(c, [j], 64, 2, noise_power=0.0), REFERENCE_STEER)
    beams = fc.adaptive_beams(out, fc.estimate_cancellation_weights(out))
    scale = np.max(np.abs(out.f_sum))
    for s, d in beams.values():
        assert np.max(np.abs(s)) < 1e-9 * scale
        assert np.max(np.abs(d)) < 1e-9 * scale


def test_table2_jammer_suppressed(cfg):
    c = cfg.with_time_shift(0.0)
    ems = table2_emitters(("target", "MLJ1"))
    out = fc.quadrant_beams(synthesize(c, ems, 512, 8), REFERENCE_STEER)
    w = fc.estimate_cancellation_weights(out)
    a = full_steering(c, ems[1].direction, ems[1].range)
    adaptive = fc.adaptive_element_weights(out, w)
    for axis in ("azimuth", "elevation"):
        ratio = abs(np.vdot(adaptive[axis][0], a)) ** 2 / abs(np.vdot(out.weights["sum"], a)) ** 2
        assert 10 * np.log10(ratio) <= -25.0


@given(st.complex_numbers(max_magnitude=10), st.complex_numbers(max_magnitude=10), st.integers(0, 1000))
def test_element_weights_reproduce_series(w_a, w_e, seed):
    cfg = RadarConfig(rows=4, cols=4)
    b = synthesize(cfg, [], 6, seed)
    out = fc.quadrant_beams(b, Steer(0.1, -0.2, 1e4))
    w = fc.CancellationWeights("azimuth_elevation", w_a, w_a, w_e, w_e)
    series = fc.adaptive_beams(out, w)
    elem = fc.adaptive_element_weights(out, w)
    for axis in series:
        for s, v in zip(series[axis], elem[axis]):
            assert np.allclose(s, b.data @ v.conj(), atol=1e-9)


def test_ratio_zero_at_steer(cfg, steer):
    c = cfg.with_time_shift(0.0)
    out = fc.quadrant_beams(batch_of(c, full_steering(c, steer.direction, 5e4)), steer)
    r = fc.adaptive_ratio(fc.adaptive_beams(out, fc.CancellationWeights("azimuth_elevation", 0j, 0j, 0j, 0j)))
    assert abs(r["azimuth"]) < 1e-12 and abs(r["elevation"]) < 1e-12


def test_ratio_with_exact_weights_matches_quiescent(cfg):
    c = cfg.with_time_shift(0.0)
    j = table2_emitters(("MLJ1",))[0]
    t = Emitter("target", Direction.from_degrees(0.6, -0.4), 5e4, 0.0)
    jam = fc.quadrant_beams(synthesize(c, [j], 64, 1, noise_power=0.0), REFERENCE_STEER)
    w = fc.estimate_cancellation_weights(jam)
    x = full_steering(c, t.direction, t.range)
    out = fc.quadrant_beams(batch_of(c, x), REFERENCE_STEER)
    r = fc.adaptive_ratio(fc.adaptive_beams(out, w))
    half_a = axis_pattern(np.ones(c.cols // 2), 2 * np.pi * c.spacing_ratio * t.direction.u)
    shift = np.exp(1j * (c.cols // 2) * 2 * np.pi * c.spacing_ratio * t.direction.u)
    m_a = (half_a - shift * half_a) / (half_a + shift * half_a)
    assert r["azimuth"] == pytest.approx(m_a, abs=1e-9)


def test_vanishing_sum_rejected():
    with pytest.raises(ValueError):
        fc.adaptive_ratio({"azimuth": (np.zeros(4, complex), np.ones(4, complex))})
