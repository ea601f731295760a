import math

import numpy as np
import pytest

from volterra_helix import _parallel
from volterra_helix.errors import ConditioningError, DomainError, ValidationError
from volterra_helix.moments import incremental_variance, variance
from volterra_helix.processes import WIENER, make_process
from volterra_helix.simulate import (
    PathEnsemble,
    TimeGrid,
    build_covariance_matrix,
    cholesky_factor,
    empirical_incremental_variance,
    empirical_variance,
    sample_paths,
)


def test_grid_validation():
    assert len(TimeGrid((1.0, 2.0))) == 2
    for pts in [(), (0.0, 1.0), (2.0, 1.0), (1.0, 1.0), (1.0, 1.0 + 1e-12), (1.0, float("nan"))]:
        with pytest.raises(ValidationError):
            TimeGrid(pts)
    assert TimeGrid.uniform(2.0, 4).points == (0.5, 1.0, 1.5, 2.0)


def test_wiener_covariance_matrix():
    cov = build_covariance_matrix(WIENER, TimeGrid((1.0, 2.0, 3.0)))
    np.testing.assert_allclose(cov, [[1, 1, 1], [1, 2, 2], [1, 2, 3]], atol=1e-14)


def test_u3_alpha_one_matrix_is_wiener():
    cov = build_covariance_matrix(make_process("U3", 1.0), TimeGrid((1.0, 2.0)))
    np.testing.assert_allclose(cov, [[1, 1], [1, 2]], rtol=1e-10)


def test_u2_matrix_diagonal_is_closed_form():
    spec = make_process("U2", 0.25, 0.4)
    cov = build_covariance_matrix(spec, TimeGrid((1.0, 2.0)))
    assert cov[1, 1] == variance(spec, 2.0)
    assert cov[0, 1] == cov[1, 0]


def test_cholesky_examples():
    f = cholesky_factor(np.eye(3))
    np.testing.assert_array_equal(f.lower, np.eye(3))
    assert f.jitter == 0.0
    f = cholesky_factor(np.array([[4.0, 2.0], [2.0, 5.0]]))
    np.testing.assert_allclose(f.lower, [[2, 0], [1, 2]])


def test_cholesky_wiener_64_points():
    grid = TimeGrid.uniform(1.0, 64)
    f = cholesky_factor(build_covariance_matrix(WIENER, grid))
    assert f.reconstruction_error <= 1e-10


def test_cholesky_jitter_repairs_semidefinite():
    m = np.ones((3, 3))
    f = cholesky_factor(m)
    assert f.jitter > 0 and f.reconstruction_error <= 1e-8


def test_cholesky_rejects_indefinite():
    with pytest.raises(ConditioningError) as info:
        cholesky_factor(np.array([[1.0, 2.0], [2.0, 1.0]]))
    assert info.value.min_eigenvalue == pytest.approx(-1.0)


def test_cholesky_rejects_nonsymmetric():
    with pytest.raises(DomainError):
        cholesky_factor(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_sample_validation():
    with pytest.raises(ValidationError):
        sample_paths(WIENER, TimeGrid((1.0,)), 0)
    with pytest.raises(ValidationError):
        sample_paths(WIENER, TimeGrid((1.0,)), 5, seed=-1)


def test_wiener_single_point_variance():
    ens = sample_paths(WIENER, TimeGrid((1.0,)), 10_000, seed=0)
    est, _ = empirical_variance(ens, 0)
    assert abs(est - 1.0) <= 3 * math.sqrt(2 / 10_000)


def test_determinism_and_thread_independence(monkeypatch):
    spec = make_process("U2", 0.25, 0.4)
    grid = TimeGrid((0.5, 1.0, 1.5))
    monkeypatch.setenv(_parallel.THREADS_ENV, "1")
    a = sample_paths(spec, grid, 500, seed=42)
    monkeypatch.setenv(_parallel.THREADS_ENV, "4")
    b = sample_paths(spec, grid, 500, seed=42)
    assert np.array_equal(a.values, b.values)
    assert a.factor_checksum == b.factor_checksum
    c = sample_paths(spec, grid, 500, seed=43)
    assert not np.array_equal(a.values, c.values)


def test_path_prefix_stable_under_more_paths():
    grid = TimeGrid((1.0, 2.0))
    small = sample_paths(WIENER, grid, 10, seed=7)
    large = sample_paths(WIENER, grid, 100, seed=7)
    assert np.array_equal(small.values, large.values[:10])


def test_ensemble_is_read_only():
    ens = sample_paths(WIENER, TimeGrid((1.0,)), 3)
    with pytest.raises(ValueError):
        ens.values[0, 0] = 1.0


def test_zero_ensemble():
    zero = PathEnsemble(WIENER, TimeGrid((1.0, 2.0)), 4, 0, np.zeros((4, 2)), "")
    assert empirical_incremental_variance(zero, 0, 1) == (0.0, 0.0)


def test_empirical_index_validation():
    ens = sample_paths(WIENER, TimeGrid((1.0, 2.0)), 3)
    with pytest.raises(DomainError):
        empirical_incremental_variance(ens, 1, 1)


def test_wiener_increment_monte_carlo():
    ens = sample_paths(WIENER, TimeGrid((1.0, 3.0)), 10_000, seed=1)
    est, se = empirical_incremental_variance(ens, 0, 1)
    assert abs(est - 2.0) <= 3 * se


def test_u2_increment_monte_carlo():
    spec = make_process("U2", 0.25, 0.4)
    ens = sample_paths(spec, TimeGrid((1.0, 1.5)), 10_000, seed=0)
    est, se = empirical_incremental_variance(ens, 0, 1)
    assert abs(est - incremental_variance(spec, 1.0, 1.5).total) <= 3 * se


@pytest.mark.parametrize(
    "spec",
    [make_process("U1", 0.3, lam=1.0), make_process("U3", 0.6), make_process("U5", -0.2, lam=1.0)],
    ids=lambda s: s.kind.value,
)
def test_grid_variances_monte_carlo(spec):
    grid = TimeGrid.uniform(1.0, 5)
    ens = sample_paths(spec, grid, 10_000, seed=3)
    for i, t in enumerate(grid.points):
        est, se = empirical_variance(ens, i)
        assert abs(est - variance(spec, t)) <= 3 * se


def test_u4_increments_stationary_monte_carlo():
    spec = make_process("U4", 0.3, lam=1.0)
    ens = sample_paths(spec, TimeGrid((0.5, 0.75, 2.0, 2.25)), 10_000, seed=4)
    a, sa = empirical_incremental_variance(ens, 0, 1)
    b, sb = empirical_incremental_variance(ens, 2, 3)
    assert abs(a - b) <= 3 * math.hypot(sa, sb)
