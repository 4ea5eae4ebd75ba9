"""Sample-level transmit/receive chain used as an oracle for the snapshot model.

Each transmit row sends the same LFM pulse delayed by ``m * time_shift``.
Code orthogonality is idealised by channel separation: receive element
(m, n) only ever sees the echo of transmit row m, carried through its own
noise-free channel. After down-conversion the row-m channel is de-mixed by
``exp(j 2 pi mu m dt t)`` and matched-filtered against the row-m reference,
which leaves one complex gain per element. Up to a common scalar those
gains are the steering vector of the fast snapshot model.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .array_model import SPEED_OF_LIGHT, RadarConfig
from .scene import Emitter

MAX_ORACLE_SIZE = 8
MIN_OVERSAMPLING = 4.0
DEFAULT_OVERSAMPLING = 8.0


class PeakNotFoundError(RuntimeError):
    """Matched-filter peak missing or at the edge of the simulated window."""


@dataclass(frozen=True)
class SampledWaveform:
    """Complex samples ``samples[k]`` taken at ``t0 + k / sample_rate``."""

    samples: np.ndarray
    sample_rate: float
    t0: float

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.samples.shape[-1]) / self.sample_rate


@dataclass(frozen=True)
class EchoGrid:
    """Down-converted, de-mixed echoes; ``samples`` has shape (M, N, T)."""

    samples: np.ndarray
    sample_rate: float
    t0: float
    cfg: RadarConfig

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.samples.shape[-1]) / self.sample_rate

    def element(self, m: int, n: int) -> SampledWaveform:
        return SampledWaveform(self.samples[m, n], self.sample_rate, self.t0)


def _check_rate(cfg: RadarConfig, sample_rate: float) -> None:
    if sample_rate < MIN_OVERSAMPLING * cfg.bandwidth:
        raise ValueError(f"sample rate {sample_rate:.4g} Hz is below {MIN_OVERSAMPLING:g} x bandwidth")


def pulse(cfg: RadarConfig, t, chirp_rate: Optional[float] = None) -> np.ndarray:
    """Continuous LFM pulse ``exp(j pi mu t^2)`` on ``[-Tp/2, Tp/2]``, zero outside."""
    mu = cfg.chirp_rate if chirp_rate is None else chirp_rate
    t = np.asarray(t, dtype=float)
    inside = np.abs(t) <= 0.5 * cfg.pulse_width
    return np.where(inside, np.exp(1j * np.pi * mu * t * t), 0.0)


def lfm(cfg: RadarConfig, sample_rate: Optional[float] = None,
        chirp_rate: Optional[float] = None) -> SampledWaveform:
    """Sampled LFM pulse covering ``[-Tp/2, Tp/2]``.

    Args:
        cfg: Radar configuration (bandwidth and pulse width).
        sample_rate: Defaults to 8 x bandwidth; must be at least 4 x bandwidth.
        chirp_rate: Overrides ``cfg.chirp_rate``; 0 gives a plain rectangle.
    """
    fs = DEFAULT_OVERSAMPLING * cfg.bandwidth if sample_rate is None else sample_rate
    _check_rate(cfg, fs)
    half = 0.5 * cfg.pulse_width
    count = int(np.floor(cfg.pulse_width * fs + 1e-9)) + 1
    t = -half + np.arange(count) / fs
    return SampledWaveform(pulse(cfg, t, chirp_rate), fs, -half)


def row_reference(cfg: RadarConfig, row: int, t) -> np.ndarray:
    """De-mixed row-``row`` waveform for a zero-delay unit echo.

    ``g(t - m dt) exp(j 2 pi mu m dt t)``; the matched filter of row m is its
    time-reversed conjugate.
    """
    shift = row * cfg.time_shift
    t = np.asarray(t, dtype=float)
    return pulse(cfg, t - shift) * np.exp(2j * np.pi * cfg.chirp_rate * shift * t)


def _as_list(emitters: Union[Emitter, Sequence[Emitter]]) -> list:
    return [emitters] if isinstance(emitters, Emitter) else list(emitters)


def default_window(cfg: RadarConfig, emitters: Sequence[Emitter]):
    """(t0, duration) enclosing every echo with a one-pulse margin on each side."""
    delays = [2.0 * e.range / SPEED_OF_LIGHT for e in emitters]
    t0 = min(delays) - cfg.pulse_width
    t1 = max(delays) + (cfg.rows - 1) * cfg.time_shift + cfg.pulse_width
    return t0, t1 - t0


def simulate_echo(cfg: RadarConfig, emitters: Union[Emitter, Sequence[Emitter]],
                  sample_rate: Optional[float] = None, t0: Optional[float] = None,
                  duration: Optional[float] = None) -> EchoGrid:
    """Noise-free per-element baseband echoes after de-mixing.

    Every transmit element of row m radiates ``g(t - m dt) exp(j 2 pi f0 t)``.
    Path delays are exact far-field delays referenced to element (0, 0),
    so the carrier and envelope both see the spatial geometry. Emitter
    amplitudes are ``sqrt(power)`` with zero phase.

    Args:
        cfg: Radar configuration; at most 8 x 8 elements.
        emitters: One emitter or a sequence (echoes add linearly).
        sample_rate: Defaults to 8 x bandwidth.
        t0, duration: Sample window; defaults enclose all echoes.
    """
    if cfg.rows > MAX_ORACLE_SIZE or cfg.cols > MAX_ORACLE_SIZE:
        raise ValueError(f"waveform oracle is limited to {MAX_ORACLE_SIZE} x {MAX_ORACLE_SIZE} arrays")
    emitters = _as_list(emitters)
    if not emitters:
        raise ValueError("need at least one emitter")
    fs = DEFAULT_OVERSAMPLING * cfg.bandwidth if sample_rate is None else sample_rate
    _check_rate(cfg, fs)
    w0, wlen = default_window(cfg, emitters)
    t0 = w0 if t0 is None else t0
    duration = wlen if duration is None else duration
    t = t0 + np.arange(int(np.ceil(duration * fs))) / fs

    d, f0, mu = cfg.element_spacing, cfg.carrier, cfg.chirp_rate
    rows, cols = np.arange(cfg.rows), np.arange(cfg.cols)
    out = np.zeros((cfg.rows, cfg.cols, t.size), dtype=complex)
    for e in emitters:
        u, v = e.direction.u, e.direction.v
        amp = np.sqrt(e.power)
        for m in rows:
            shift = m * cfg.time_shift
            tx = e.range / SPEED_OF_LIGHT - (m * v + cols * u) * d / SPEED_OF_LIGHT  # per transmit column
            for n in cols:
                rx = e.range / SPEED_OF_LIGHT - (m * v + n * u) * d / SPEED_OF_LIGHT
                tau = tx + rx
                # down-converted echo summed over the row's transmit columns
                env = pulse(cfg, t[None, :] - tau[:, None] - shift)
                out[m, n] += amp * np.sum(env * np.exp(-2j * np.pi * f0 * tau)[:, None], axis=0)
    # de-mix each row channel
    out *= np.exp(2j * np.pi * mu * (rows * cfg.time_shift)[:, None, None] * t[None, None, :])
    return EchoGrid(out, fs, t0, cfg)


def _refine_peak(corr: np.ndarray) -> tuple:
    """Integer argmax of |corr| plus its quadratic-interpolated fractional offset."""
    mag = np.abs(corr)
    k = int(np.argmax(mag))
    if k == 0 or k == mag.size - 1 or not mag[k] > 0:
        raise PeakNotFoundError("matched-filter peak at the window edge; emitter outside the simulated window")
    a, b, c = mag[k - 1], mag[k], mag[k + 1]
    den = a - 2.0 * b + c
    frac = 0.0 if den == 0 else 0.5 * (a - c) / den
    return k, float(np.clip(frac, -0.5, 0.5))


def matched_filter_extract(echo: EchoGrid, cfg: Optional[RadarConfig] = None) -> np.ndarray:
    """Complex matched-filter gain per element, row-major, length M*N.

    The discrete correlation maximum is refined by quadratic interpolation
    of its magnitude; the gain is then read by correlating against the
    row reference placed at that fractional delay. Dividing by the
    reference energy removes the pulse-length scaling.
    """
    cfg = echo.cfg if cfg is None else cfg
    fs, t = echo.sample_rate, echo.times
    half = 0.5 * cfg.pulse_width
    out = np.empty((cfg.rows, cfg.cols), dtype=complex)
    for m in range(cfg.rows):
        shift = m * cfg.time_shift
        s = shift - half + np.arange(int(np.floor(cfg.pulse_width * fs + 1e-9)) + 1) / fs
        ref = row_reference(cfg, m, s)
        for n in range(cfg.cols):
            y = echo.samples[m, n]
            if y.size < ref.size + 2:
                raise PeakNotFoundError("echo window shorter than the pulse")
            corr = np.correlate(y, ref, mode="valid")
            k, frac = _refine_peak(corr)
            tau = echo.t0 + (k + frac) / fs - s[0]
            r = row_reference(cfg, m, t - tau)
            out[m, n] = np.vdot(r, y) / np.vdot(r, r).real
    return out.ravel()


@dataclass(frozen=True)
class OracleResult:
    """Worst-case agreement between the sampled chain and the snapshot model."""

    max_phase_error: float
    max_ripple: float
    emitters: int


def compare_to_model(cfg: RadarConfig, emitter: Emitter, sample_rate: Optional[float] = None):
    """(phase error, magnitude ripple) arrays of the extracted vector vs the model.

    Both vectors are normalised by their first entry, which removes the
    common complex scalar.
    """
    from .array_model import full_steering

    extracted = matched_filter_extract(simulate_echo(cfg, emitter, sample_rate), cfg)
    model = full_steering(cfg, emitter.direction, emitter.range)
    ratio = (extracted / extracted[0]) / (model / model[0])
    return np.abs(np.angle(ratio)), np.abs(np.abs(ratio) - 1.0)


def random_emitters(count: int, seed: int = 0, max_angle_deg: float = 15.0,
                    range_span=(20e3, 100e3)) -> Sequence[Emitter]:
    """Random single targets for oracle runs (angles uniform within +/- ``max_angle_deg``)."""
    from .array_model import Direction

    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    out = []
    for i in range(count):
        az, el = rng.uniform(-max_angle_deg, max_angle_deg, size=2)
        out.append(Emitter("target", Direction.from_degrees(az, el), float(rng.uniform(*range_span)), 0.0, f"oracle{i}"))
    return out


def oracle_check(cfg: RadarConfig, count: int = 20, seed: int = 0,
                 sample_rate: Optional[float] = None) -> OracleResult:
    """Run ``count`` random emitters through the chain and report the worst errors."""
    phase, ripple = 0.0, 0.0
    for e in random_emitters(count, seed):
        p, r = compare_to_model(cfg, e, sample_rate)
        phase, ripple = max(phase, float(p.max())), max(ripple, float(r.max()))
    return OracleResult(phase, ripple, count)
