import numpy as np
import pytest

from gmux.designs import (
    MultiKWeights,
    complement_design,
    identity_design,
    individual_plus_joint,
    multi_k_design,
    single_k_design,
)
from gmux.errors import SimulationError, SingularDesignError
from gmux.hadamard import core_design, truncated_core_design
from gmux.model import Design, estimator_covariance
from gmux.simulator import (
    SimConfig,
    covariance_standard_errors,
    default_mu,
    invariance_check,
    sample_observation,
    simulate,
    substream,
)


def test_zero_noise_observation():
    d = Design.from_rows([[1, 1], [1, 0]], [1.5, 0.5])
    x = sample_observation(d, [3, 4], zero_noise=True)
    assert x.values == (10.5, 1.5)


def test_single_row_mean_and_variance():
    # rank deficient but valid: sampling works, estimation does not
    d = Design(2, [[1, 1]], [2])
    rng = substream(5)
    xs = np.array([sample_observation(d, [3, 4], rng=rng).values[0] for _ in range(20_000)])
    assert abs(xs.mean() - 14) < 4 * np.sqrt(2 / len(xs))
    assert abs(xs.var(ddof=1) - 2) < 4 * 2 * np.sqrt(2 / len(xs))


def test_identity_observation_moments():
    d = identity_design(2)
    rng = substream(11)
    xs = np.array([sample_observation(d, [1, 2], rng=rng).values for _ in range(20_000)])
    se = 1 / np.sqrt(len(xs))
    assert np.all(np.abs(xs.mean(axis=0) - [1, 2]) < 4 * se)
    # var of the sample variance of a unit normal is about 2/n
    assert np.all(np.abs(xs.var(axis=0, ddof=1) - 1) < 4 * np.sqrt(2 / len(xs)))


def test_observation_argument_checks():
    d = identity_design(2)
    with pytest.raises(SimulationError):
        sample_observation(d, [1, 2, 3], zero_noise=True)
    with pytest.raises(SimulationError):
        sample_observation(d, [1, 2])
    with pytest.raises(SimulationError):
        sample_observation(d, [1, 2], noise_variance=0.0, rng=substream(0))


def test_core_design_seven_matches_closed_form():
    r = simulate(SimConfig(core_design(7).design, default_mu(7), 100_000, 42))
    assert r.theoretical_mse == pytest.approx(3.0625, rel=1e-12)
    assert abs(r.empirical_mse - 3.0625) < 3 * r.mse_standard_error


def test_identity_four():
    r = simulate(SimConfig(identity_design(4), [5, -1, 0, 2], 100_000, 7))
    assert abs(r.empirical_mse - 4) < 3 * r.mse_standard_error
    assert np.all(np.abs(r.per_coordinate_bias) < 4 * r.bias_standard_error)
    assert np.allclose(r.empirical_covariance, r.empirical_covariance.T)
    assert r.trials == 100_000 and r.seed == 7


def test_zero_noise_run():
    r = simulate(SimConfig(identity_design(3), [1, 2, 3], 10, 0, zero_noise=True))
    assert r.empirical_mse == 0.0 and np.all(r.per_coordinate_bias == 0)


def test_reproducible():
    cfg = SimConfig(complement_design(5), default_mu(5), 5000, 123)
    a, b = simulate(cfg), simulate(cfg)
    assert a.errors.tobytes() == b.errors.tobytes()
    assert a.to_dict() == b.to_dict()
    assert simulate(SimConfig(complement_design(5), default_mu(5), 5000, 124)).empirical_mse != a.empirical_mse


def test_partitions_reproducible_and_thread_independent():
    cfg = SimConfig(complement_design(4), default_mu(4), 10_001, 9)
    serial = simulate(cfg, partitions=4)
    threaded = simulate(cfg, partitions=4, workers=4)
    assert serial.errors.tobytes() == threaded.errors.tobytes()
    assert serial.errors.shape == (10_001, 4)
    assert serial.errors.tobytes() != simulate(cfg).errors.tobytes()


def _families(n):
    yield identity_design(n)
    yield complement_design(n)
    yield individual_plus_joint(n, 0.1)
    yield single_k_design(n, max(1, n // 2))
    yield multi_k_design(n, MultiKWeights.from_mapping(n, {1: 0.5, n: 0.5}))
    yield truncated_core_design(n).design


@pytest.mark.parametrize("n", range(2, 9))
def test_unbiased_across_families(n):
    for i, d in enumerate(_families(n)):
        r = simulate(SimConfig(d, default_mu(n) * 3, 100_000, 1000 * n + i))
        assert np.all(np.abs(r.per_coordinate_bias) < 4 * r.bias_standard_error), (n, i)


def test_covariance_matches_inverse_information():
    d = truncated_core_design(5).design
    target = estimator_covariance(d)
    r = simulate(SimConfig(d, default_mu(5), 1_000_000, 77), partitions=8)
    se = covariance_standard_errors(r.errors)
    assert np.all(np.abs(r.empirical_covariance - target) < 5 * se)
    small = simulate(SimConfig(d, default_mu(5), 10_000, 77))
    assert np.linalg.norm(r.empirical_covariance - target) < np.linalg.norm(small.empirical_covariance - target)


def test_noise_variance_scaling():
    d = complement_design(4)
    one = simulate(SimConfig(d, default_mu(4), 200_000, 3))
    two = simulate(SimConfig(d, default_mu(4), 200_000, 4, noise_variance=2.0))
    assert two.theoretical_mse == pytest.approx(2 * one.theoretical_mse)
    assert abs(two.empirical_mse - 2 * one.empirical_mse) < 3 * np.hypot(two.mse_standard_error, 2 * one.mse_standard_error)


def test_invariance_examples():
    r = invariance_check(identity_design(3), [[0, 0, 0], [10, -10, 5]], 20_000, 1)
    assert r.consistent and len(r.mses) == 2
    r = invariance_check(core_design(3).design, [[0, 0, 0], [1e4, -3e4, 2e4]], 20_000, 2)
    assert r.consistent


def test_invariance_preconditions():
    with pytest.raises(SimulationError):
        invariance_check(identity_design(2), [[0, 0], [1, 1]], 1, 0)
    with pytest.raises(SimulationError):
        invariance_check(identity_design(2), [[0, 0]], 1000, 0)


def test_config_checks():
    with pytest.raises(SimulationError):
        SimConfig(identity_design(2), [0, 0], 0, 0)
    with pytest.raises(SimulationError):
        SimConfig(identity_design(2), [0], 10, 0)
    with pytest.raises(SimulationError):
        SimConfig(identity_design(2), [0, 0], 10, -1)
    with pytest.raises(SingularDesignError):
        simulate(SimConfig(Design(2, [[1, 1]], [2]), [0, 0], 10, 0))
