"""Emitters and statistical snapshot synthesis at the matched-filter output."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .array_model import Direction, RadarConfig, full_steering

RNG_ALGORITHM = "numpy.random.PCG64 via SeedSequence"

SeedLike = Union[int, np.random.SeedSequence]


@dataclass(frozen=True)
class Emitter:
    """Point source. ``power_db`` is SNR (target) or JNR (jammer) per element."""

    kind: str
    direction: Direction
    range: float
    power_db: float
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("target", "jammer"):
            raise ValueError(f"emitter kind must be 'target' or 'jammer', got {self.kind!r}")
        if not self.range > 0:
            raise ValueError("emitter range must be positive")
        if not np.isfinite(self.power_db):
            raise ValueError("emitter power must be finite")

    @property
    def power(self) -> float:
        return 10.0 ** (self.power_db / 10.0)

    def with_power(self, power_db: float) -> "Emitter":
        return Emitter(self.kind, self.direction, self.range, power_db, self.name)

    def with_direction(self, direction: Direction) -> "Emitter":
        return Emitter(self.kind, direction, self.range, self.power_db, self.name)


@dataclass(frozen=True)
class SnapshotBatch:
    """K snapshots of length M*N; ``data[k]`` is snapshot k in row-major element order."""

    data: np.ndarray
    cfg: RadarConfig
    seed: object
    emitters: tuple = field(default_factory=tuple)
    rng_algorithm: str = RNG_ALGORITHM

    @property
    def num_snapshots(self) -> int:
        return self.data.shape[0]

    def as_grid(self) -> np.ndarray:
        """View of the data with shape (K, M, N)."""
        return self.data.reshape(-1, self.cfg.rows, self.cfg.cols)


def _rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def complex_gaussian(rng: np.random.Generator, shape, power: float = 1.0) -> np.ndarray:
    """Circular complex Gaussian samples with E|x|^2 = ``power``."""
    scale = np.sqrt(power / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def synthesize(cfg: RadarConfig, emitters: Sequence[Emitter], num_snapshots: int,
               seed: SeedLike, noise_power: float = 1.0) -> SnapshotBatch:
    """Draw a batch of matched-filter snapshots.

    Jammer envelopes are i.i.d. circular Gaussian per snapshot. The target
    envelope has constant modulus and a single random phase for the batch.
    Noise is white with per-element power ``noise_power``.
    """
    if num_snapshots < 1:
        raise ValueError("need at least one snapshot")
    rng = _rng(seed)
    n = cfg.num_elements
    data = np.zeros((num_snapshots, n), dtype=complex)
    for emitter in emitters:
        steering = full_steering(cfg, emitter.direction, emitter.range)
        if emitter.kind == "target":
            phase = rng.uniform(0.0, 2.0 * np.pi)
            envelope = np.full(num_snapshots, np.sqrt(emitter.power) * np.exp(1j * phase))
        else:
            envelope = complex_gaussian(rng, num_snapshots, emitter.power)
        data += np.outer(envelope, steering)
    if noise_power > 0:
        data += complex_gaussian(rng, (num_snapshots, n), noise_power)
    return SnapshotBatch(data, cfg, seed, tuple(emitters))


def covariance(snapshots: np.ndarray, centered: bool = False) -> np.ndarray:
    """Sample covariance (1/K) sum x x^H of the rows of ``snapshots`` (shape K x dim).

    With ``centered`` the sample mean is removed first, which drops any
    component that is constant over the batch (the target echo).
    """
    x = np.asarray(snapshots)
    if centered:
        x = x - x.mean(axis=0)
    r = x.T @ x.conj() / x.shape[0]
    return 0.5 * (r + r.conj().T)


def sample_covariance(batch: SnapshotBatch, selector=None) -> np.ndarray:
    """Sample covariance of the elements picked by ``selector`` (all if None)."""
    if selector is None:
        return covariance(batch.data)
    idx = np.asarray(selector, dtype=int).ravel()
    if idx.size == 0:
        raise ValueError("empty element selector")
    if idx.min() < 0 or idx.max() >= batch.data.shape[1]:
        raise IndexError("selector index outside the array")
    return covariance(batch.data[:, idx])


def exact_covariance(cfg: RadarConfig, emitters: Sequence[Emitter], noise_power: float = 1.0) -> np.ndarray:
    """Model covariance sum P a a^H + noise I (target treated as a power term)."""
    r = noise_power * np.eye(cfg.num_elements, dtype=complex)
    for e in emitters:
        a = full_steering(cfg, e.direction, e.range)
        r += e.power * np.outer(a, a.conj())
    return r
