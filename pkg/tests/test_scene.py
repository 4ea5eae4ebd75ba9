import numpy as np
import pytest
from hypothesis import given, strategies as st

from stca_monopulse.array_model import Direction, RadarConfig, full_steering
from stca_monopulse.pipeline import table2_emitters
from stca_monopulse.scene import (
    RNG_ALGORITHM,
    Emitter,
    covariance,
    exact_covariance,
    sample_covariance,
    synthesize,
)

SMALL = RadarConfig(rows=4, cols=4)


def jammer(az=3.0, el=-3.0, power=40.0, r=75.3e3):
    return Emitter("jammer", Direction.from_degrees(az, el), r, power, "J")


@pytest.mark.parametrize("kwargs", [dict(kind="clutter"), dict(range=0.0), dict(power_db=np.inf)])
def test_emitter_validation(kwargs):
    base = dict(kind="target", direction=Direction(0.0, 0.0), range=1e4, power_db=0.0)
    base.update(kwargs)
    with pytest.raises(ValueError):
        Emitter(**base)


def test_zero_snapshots_rejected():
    with pytest.raises(ValueError):
        synthesize(SMALL, [], 0, 0)


def test_noise_only_power():
    b = synthesize(SMALL, [], 100_000, 1)
    power = np.mean(np.abs(b.data) ** 2, axis=0)
    assert np.all(np.abs(power - 1.0) < 0.02)
    assert b.rng_algorithm == RNG_ALGORITHM


def test_noise_free_boresight_target_is_flat():
    c = SMALL.with_time_shift(0.0)
    t = Emitter("target", Direction(0.0, 0.0), 5e4, 10.0)
    b = synthesize(c, [t], 8, 3, noise_power=0.0)
    for x in b.data:
        assert np.allclose(x, x[0])
        assert abs(x[0]) == pytest.approx(np.sqrt(10.0))
    # one random phase per batch
    assert np.allclose(b.data, b.data[0])


def test_power_accounting():
    ems = [jammer(power=3.0), Emitter("target", Direction.from_degrees(1, 2), 5e4, 0.0)]
    b = synthesize(SMALL, ems, 100_000, 5)
    power = np.mean(np.abs(b.data) ** 2)
    expected = 1.0 + 10 ** 0.3 + 1.0
    assert abs(power / expected - 1.0) < 0.03


def test_table2_largest_eigenvalue():
    cfg = RadarConfig()
    ems = table2_emitters(("target", "MLJ1"))
    b = synthesize(cfg, ems, 512, 11)
    top = np.linalg.eigvalsh(sample_covariance(b))[-1]
    oracle = np.linalg.eigvalsh(exact_covariance(cfg, ems[1:]))[-1]
    assert oracle == pytest.approx(cfg.num_elements * 1e4 + 1.0, rel=1e-9)
    assert abs(top / oracle - 1.0) < 0.2


def test_determinism_and_seed_sensitivity():
    ems = [jammer()]
    a = synthesize(SMALL, ems, 16, 42)
    b = synthesize(SMALL, ems, 16, 42)
    c = synthesize(SMALL, ems, 16, 43)
    assert a.data.tobytes() == b.data.tobytes()
    assert not np.array_equal(a.data, c.data)
    seq = np.random.SeedSequence(42)
    assert synthesize(SMALL, ems, 16, seq).data.tobytes() == a.data.tobytes()


def test_covariance_converges_to_identity():
    # relative Frobenius error scales as sqrt(dim / K): about 3% for one 4-element row
    b = synthesize(SMALL, [], 4096, 2)
    r = sample_covariance(b, [0, 1, 2, 3])
    assert np.linalg.norm(r - np.eye(4)) / np.linalg.norm(np.eye(4)) < 0.05


def test_single_snapshot_covariance_rank_one():
    b = synthesize(SMALL, [jammer()], 1, 2)
    assert np.linalg.matrix_rank(sample_covariance(b), tol=1e-9) == 1


def test_jammer_principal_eigenvector():
    j = jammer()
    b = synthesize(SMALL, [j], 512, 9)
    _, vecs = np.linalg.eigh(sample_covariance(b))
    a = full_steering(SMALL, j.direction, j.range)
    corr = abs(np.vdot(vecs[:, -1], a)) / np.linalg.norm(a)
    assert corr > 0.999


def test_selector_validation():
    b = synthesize(SMALL, [], 4, 0)
    with pytest.raises(ValueError):
        sample_covariance(b, [])
    with pytest.raises(IndexError):
        sample_covariance(b, [0, 16])
    assert sample_covariance(b, [0, 3]).shape == (2, 2)


def test_centered_covariance_drops_constant_component():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((64, 3)) + 1j * rng.standard_normal((64, 3))
    offset = np.array([5.0, -2j, 1 + 1j])
    assert np.allclose(covariance(x + offset, centered=True), covariance(x, centered=True))


@given(st.integers(1, 40), st.integers(0, 2**32 - 1), st.floats(-10, 40))
def test_covariance_hermitian_psd(k, seed, power):
    b = synthesize(SMALL, [jammer(power=power)], k, seed)
    r = sample_covariance(b)
    assert np.max(np.abs(r - r.conj().T)) <= 1e-12 * max(1.0, np.max(np.abs(r)))
    assert np.linalg.eigvalsh(r).min() >= -1e-9 * max(1.0, np.trace(r).real)


@given(st.integers(1, 20), st.integers(0, 2**32 - 1))
def test_snapshot_shape(k, seed):
    b = synthesize(SMALL, [], k, seed)
    assert b.data.shape == (k, 16)
    assert b.as_grid().shape == (k, 4, 4)
