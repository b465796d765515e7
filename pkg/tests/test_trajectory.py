import mpmath
import numpy as np
import pytest

from objmot.errors import GenerationExhaustedError, InvalidParameterError
from objmot.seeding import rng_for
from objmot.trajectory import (
    GpParams,
    gram_matrix,
    sample_crossing_trajectories,
    sample_linear_trajectory,
    sample_trajectory,
    se_kernel,
    vmds_gp_params,
)


def test_se_kernel_zero_lag():
    assert se_kernel(5, 5, 10) == 1.0


def test_se_kernel_derived_values():
    # Independent arbitrary-precision evaluation of exp(-(s-t)^2/(2 tau^2)).
    expected_half = float(mpmath.e ** mpmath.mpf("-0.5"))
    expected_two = float(mpmath.e ** mpmath.mpf("-2"))
    assert se_kernel(0, 10, 10) == pytest.approx(expected_half, abs=1e-12)
    assert se_kernel(0, 20, 10) == pytest.approx(expected_two, abs=1e-12)


def test_se_kernel_symmetric_exhaustive():
    for s in range(32):
        for t in range(32):
            assert se_kernel(s, t, 7.3) == se_kernel(t, s, 7.3)


def test_se_kernel_range_and_errors():
    assert 0.0 < se_kernel(0, 100, 3) <= 1.0
    with pytest.raises(InvalidParameterError):
        se_kernel(0, 1, 0.0)
    with pytest.raises(InvalidParameterError):
        se_kernel(0, 1, -2.0)


def test_gram_matrix_trivial_and_derived():
    assert gram_matrix(1, 10).tolist() == [[1.0]]
    g = gram_matrix(2, 10)
    off = float(np.exp(-0.005))
    assert np.allclose(g, [[1.0, off], [off, 1.0]], atol=1e-15)


def test_gram_matrix_positive_definite_with_jitter():
    g = gram_matrix(20, 10) + 1e-10 * np.eye(20)
    # Independent check through the eigenvalue route.
    assert np.linalg.eigvalsh(g).min() > 0


def test_gram_matrix_matches_kernel_entrywise():
    g = gram_matrix(8, 4.5)
    for s in range(8):
        for t in range(8):
            assert g[s, t] == pytest.approx(se_kernel(s, t, 4.5), abs=1e-15)


def test_gp_params_validation():
    with pytest.raises(InvalidParameterError):
        GpParams(tau=0, bounds_lo=10, bounds_hi=54, length=10)
    with pytest.raises(InvalidParameterError):
        GpParams(tau=10, bounds_lo=54, bounds_hi=10, length=10)
    with pytest.raises(InvalidParameterError):
        GpParams(tau=10, bounds_lo=10, bounds_hi=54, length=0)


def test_sample_trajectory_in_bounds_and_shape():
    params = vmds_gp_params(10)
    rng = rng_for(0, 1)
    for _ in range(50):
        traj = sample_trajectory(rng, params)
        assert traj.points.shape == (10, 2)
        assert np.all(traj.points >= 10.0)
        assert np.all(traj.points <= 54.0)


def test_sample_trajectory_length_one_uniform_in_box():
    params = vmds_gp_params(1)
    rng = rng_for(3)
    pts = np.array([sample_trajectory(rng, params).points[0] for _ in range(2000)])
    assert np.all((pts >= 10) & (pts <= 54))
    # Rough uniformity: mean near box center.
    assert np.allclose(pts.mean(axis=0), 32.0, atol=1.5)


def test_sample_trajectory_deterministic():
    params = vmds_gp_params(10)
    a = sample_trajectory(rng_for(42, 5), params)
    b = sample_trajectory(rng_for(42, 5), params)
    assert np.array_equal(a.points, b.points)
    assert a.shift == b.shift


def test_sample_trajectory_exhaustion():
    # A box too tight for the GP amplitude forces rejection exhaustion.
    params = GpParams(tau=10, bounds_lo=10.0, bounds_hi=10.001, length=10, max_rejects=5)
    with pytest.raises(GenerationExhaustedError) as exc:
        sample_trajectory(rng_for(0), params)
    assert exc.value.rejects == 5


def test_gp_lag_correlation_monte_carlo():
    # De-shifted paths should reproduce the kernel's lag correlation.
    params = vmds_gp_params(11)
    rng = rng_for(2024)
    n = 10_000
    deshifted = np.empty((n, 11))
    for i in range(n):
        traj = sample_trajectory(rng, params)
        deshifted[i] = traj.points[:, 0] - traj.shift[0]
    x0 = deshifted[:, 0]
    x10 = deshifted[:, 10]
    corr = np.corrcoef(x0, x10)[0, 1]
    assert corr == pytest.approx(np.exp(-0.5), abs=0.03)


def test_crossing_trajectories_same_pixel():
    params = vmds_gp_params(10)
    for seed in range(30):
        trajs, record = sample_crossing_trajectories(rng_for(seed, "cross"), params, 3)
        assert len(trajs) == 3
        i, j = record.pair
        pi = np.round(trajs[i].points[record.frame])
        pj = np.round(trajs[j].points[record.frame])
        assert np.array_equal(pi, pj)
        for traj in trajs:
            assert np.all(traj.points >= 10.0) and np.all(traj.points <= 54.0)


def test_crossing_trajectories_two_objects_and_determinism():
    params = vmds_gp_params(10)
    a, rec_a = sample_crossing_trajectories(rng_for(9), params, 2)
    b, rec_b = sample_crossing_trajectories(rng_for(9), params, 2)
    assert rec_a == rec_b
    for ta, tb in zip(a, b):
        assert np.array_equal(ta.points, tb.points)
    with pytest.raises(InvalidParameterError):
        sample_crossing_trajectories(rng_for(0), params, 1)


def test_linear_trajectory_properties():
    rng = rng_for(7)
    traj = sample_linear_trajectory(rng, 10, (16.0, 112.0), (-3.0, 3.0))
    assert traj.points.shape == (10, 2)
    second_diff = np.diff(traj.points, n=2, axis=0)
    assert np.allclose(second_diff, 0.0, atol=1e-9)


def test_linear_trajectory_zero_speed_constant():
    traj = sample_linear_trajectory(rng_for(1), 8, (10.0, 50.0), (0.0, 0.0))
    assert np.allclose(traj.points, traj.points[0])


def test_linear_trajectory_deterministic():
    a = sample_linear_trajectory(rng_for(11, 2), 10, (16.0, 112.0), (-3.0, 3.0))
    b = sample_linear_trajectory(rng_for(11, 2), 10, (16.0, 112.0), (-3.0, 3.0))
    assert np.array_equal(a.points, b.points)


def test_empirical_covariance_matches_gram():
    params = vmds_gp_params(5)
    rng = rng_for(99)
    n = 10_000
    deshifted = np.empty((n, 5))
    for i in range(n):
        traj = sample_trajectory(rng, params)
        deshifted[i] = traj.points[:, 1] - traj.shift[1]
    emp = deshifted.T @ deshifted / n
    assert np.max(np.abs(emp - gram_matrix(5, 10))) < 0.03
