import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stca_monopulse.array_model import SPEED_OF_LIGHT, Direction, RadarConfig, full_steering
from stca_monopulse.scene import Emitter
from stca_monopulse.waveform_chain import (
    PeakNotFoundError,
    compare_to_model,
    lfm,
    matched_filter_extract,
    oracle_check,
    simulate_echo,
)

SMALL = RadarConfig(rows=4, cols=4)


def target(az, el, r, power=0.0):
    return Emitter("target", Direction.from_degrees(az, el), r, power)


def test_lfm_samples_and_window(cfg):
    w = lfm(cfg)
    assert w.sample_rate == 8 * cfg.bandwidth
    assert w.times[0] == pytest.approx(-cfg.pulse_width / 2)
    assert w.times[-1] <= cfg.pulse_width / 2 + 1e-15
    assert np.allclose(w.samples, np.exp(1j * np.pi * cfg.chirp_rate * w.times ** 2))


def test_lfm_zero_chirp_is_rectangle(cfg):
    w = lfm(cfg, chirp_rate=0.0)
    assert np.array_equal(w.samples, np.ones_like(w.samples))


def test_lfm_autocorrelation_peak(cfg):
    w = lfm(cfg)
    corr = np.correlate(w.samples, w.samples, "full")
    k = int(np.argmax(np.abs(corr)))
    assert k == w.samples.size - 1
    assert abs(corr[k]) == pytest.approx(w.samples.size)


def test_lfm_mainlobe_width(cfg):
    w = lfm(cfg)
    mag = np.abs(np.correlate(w.samples, w.samples, "full"))
    db = 20 * np.log10(mag / mag.max())
    k = int(np.argmax(mag))
    i = k
    while db[i] > -4.0:
        i += 1
    edge = (i - 1) + (-4.0 - db[i - 1]) / (db[i] - db[i - 1])
    width = 2 * (edge - k) / w.sample_rate
    assert width == pytest.approx(1.0 / cfg.bandwidth, rel=0.05)


def test_lfm_undersampled_rejected(cfg):
    with pytest.raises(ValueError):
        lfm(cfg, sample_rate=3.9 * cfg.bandwidth)


def test_echo_size_limits():
    with pytest.raises(ValueError):
        simulate_echo(RadarConfig(rows=10, cols=4), target(0, 0, 5e4))
    with pytest.raises(ValueError):
        simulate_echo(SMALL, [])


def test_boresight_mimo_extracts_ones():
    c = SMALL.with_time_shift(0.0)
    g = matched_filter_extract(simulate_echo(c, target(0, 0, 4e4)))
    g = g / g[0]
    assert np.max(np.abs(g - 1.0)) < 1e-3


def test_reference_example_phase_error():
    c = RadarConfig(rows=4, cols=4, time_shift=1.0 / 20e6)
    phase, ripple = compare_to_model(c, target(2.0, 3.0, 60e3))
    assert phase.max() < 0.01
    assert ripple.max() < 0.01


def test_row_phase_relation():
    c = SMALL
    e = target(2.0, 3.0, 60e3)
    g = matched_filter_extract(simulate_echo(c, e))
    theta = e.direction.elevation
    for m in range(c.rows):
        measured = np.angle(g[m * c.cols] / g[0])
        expected = 4 * np.pi * m * (c.spacing_ratio * np.sin(theta)
                                    + c.chirp_rate * e.range * c.time_shift / SPEED_OF_LIGHT)
        assert abs(np.angle(np.exp(1j * (measured - expected)))) < 0.01


def test_extraction_matches_model_times_scalar():
    e = target(-4.0, 6.0, 33e3)
    g = matched_filter_extract(simulate_echo(SMALL, e))
    v = full_steering(SMALL, e.direction, e.range)
    scale = g[0] / v[0]
    assert np.max(np.abs(g - scale * v)) / abs(scale) < 0.01


def test_peak_outside_window():
    e = target(0, 0, 50e3)
    t_echo = 2 * e.range / SPEED_OF_LIGHT
    echo = simulate_echo(SMALL, e, t0=t_echo + 3 * SMALL.pulse_width, duration=2 * SMALL.pulse_width)
    with pytest.raises(PeakNotFoundError):
        matched_filter_extract(echo)


@settings(max_examples=5)
@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(20e3, 90e3))
def test_linearity(az, el, r):
    a, b = target(az, el, r, 3.0), target(-el, az, r + 400.0, -2.0)
    window = dict(t0=2 * 19e3 / SPEED_OF_LIGHT, duration=2 * 73e3 / SPEED_OF_LIGHT + 3 * SMALL.pulse_width)
    joint = simulate_echo(SMALL, [a, b], **window).samples
    split = simulate_echo(SMALL, a, **window).samples + simulate_echo(SMALL, b, **window).samples
    assert np.max(np.abs(joint - split)) <= 1e-9 * np.max(np.abs(joint))


def test_oracle_check_small_run():
    res = oracle_check(SMALL, count=3, seed=7)
    assert res.emitters == 3
    assert res.max_phase_error < 0.01
    assert res.max_ripple < 0.01
