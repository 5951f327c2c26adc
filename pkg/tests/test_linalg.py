import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bondising.errors import ConvergenceError, InvalidInputError
from bondising.imps import _site_transfer, random_product_state
from bondising.linalg import dominant_eigenpair, truncated_svd


def test_svd_identity():
    res = truncated_svd(np.eye(2), chi_max=2, cutoff=0.0)
    np.testing.assert_allclose(res.s, [1.0, 1.0])
    assert res.truncation_error == 0.0


def test_svd_rank_one():
    res = truncated_svd(np.ones((2, 2)), chi_max=2, cutoff=1e-12)
    assert res.rank == 1
    np.testing.assert_allclose(res.s, [2.0])
    assert res.truncation_error < 1e-10


def test_svd_truncation_error_formula():
    # discarded weight 1 out of 3^2 + 2^2 + 1^2 = 14
    res = truncated_svd(np.diag([3.0, 2.0, 1.0]), chi_max=2, cutoff=0.0)
    np.testing.assert_allclose(res.s, [3.0, 2.0])
    assert res.truncation_error == pytest.approx(1 / np.sqrt(14), abs=1e-12)
    assert res.truncation_error == pytest.approx(0.2672612, abs=1e-7)


def test_svd_cutoff_relative_to_largest():
    res = truncated_svd(np.diag([10.0, 1e-3, 1e-9]), chi_max=3, cutoff=1e-6)
    np.testing.assert_allclose(res.s, [10.0, 1e-3])


@pytest.mark.parametrize("bad", [np.array([[np.nan, 1.0]]), np.array([[np.inf]]), np.zeros((0, 2))])
def test_svd_rejects_bad_input(bad):
    with pytest.raises(InvalidInputError):
        truncated_svd(bad, chi_max=2)


def test_svd_rejects_bad_parameters():
    with pytest.raises(InvalidInputError):
        truncated_svd(np.eye(2), chi_max=0)
    with pytest.raises(InvalidInputError):
        truncated_svd(np.eye(2), chi_max=2, cutoff=-1.0)


@settings(max_examples=50, deadline=None)
@given(
    rows=st.integers(1, 8),
    cols=st.integers(1, 8),
    seed=st.integers(0, 2**32 - 1),
)
def test_svd_reconstruction_and_isometry(rows, cols, seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    res = truncated_svd(m, chi_max=min(rows, cols), cutoff=0.0)
    np.testing.assert_allclose(res.reconstruct(), m, atol=1e-10)
    k = res.rank
    np.testing.assert_allclose(res.u.conj().T @ res.u, np.eye(k), atol=1e-10)
    np.testing.assert_allclose(res.vh @ res.vh.conj().T, np.eye(k), atol=1e-10)
    assert np.all(np.diff(res.s) <= 0) and np.all(res.s >= 0)


@settings(max_examples=30, deadline=None)
@given(rows=st.integers(2, 8), chi=st.integers(1, 4), seed=st.integers(0, 2**32 - 1))
def test_svd_truncation_error_matches_discarded_weight(rows, chi, seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((rows, rows))
    full = np.linalg.svd(m, compute_uv=False)
    res = truncated_svd(m, chi_max=chi)
    keep = min(chi, rows)
    expected = np.sqrt(np.sum(full[keep:] ** 2) / np.sum(full**2))
    assert res.truncation_error == pytest.approx(expected, abs=1e-12)
    # reconstruction error in Frobenius norm equals the discarded weight
    err = np.linalg.norm(res.reconstruct() - m) / np.linalg.norm(m)
    assert err == pytest.approx(expected, abs=1e-10)


def test_power_iteration_diagonal():
    a = np.diag([2.0, 1.0])
    mu, v = dominant_eigenpair(lambda x: a @ x, 2, tol=1e-12, seed=3)
    assert mu == pytest.approx(2.0, abs=1e-10)
    assert abs(abs(v[0]) - 1.0) < 1e-10
    assert np.linalg.norm(v) == pytest.approx(1.0)


def test_power_iteration_tie_reports_diagnostics():
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(ConvergenceError) as info:
        dominant_eigenpair(lambda x: swap @ x, 2, tol=1e-10, max_iter=2000, seed=0)
    err = info.value
    assert err.magnitude == pytest.approx(1.0, abs=1e-12)
    assert err.residual > 1e-10
    assert err.iterations == 2000


def test_power_iteration_deterministic():
    rng = np.random.default_rng(5)
    a = rng.random((6, 6))
    r1 = dominant_eigenpair(lambda x: a @ x, 6, seed=11)
    r2 = dominant_eigenpair(lambda x: a @ x, 6, seed=11)
    assert r1[0] == r2[0]
    np.testing.assert_array_equal(r1[1], r2[1])


def test_power_iteration_residual():
    rng = np.random.default_rng(8)
    a = rng.random((5, 5))
    mu, v = dominant_eigenpair(lambda x: a @ x, 5, tol=1e-12)
    assert np.linalg.norm(a @ v - mu * v) <= 1e-12 * max(1, abs(mu))


def test_self_transfer_of_product_state_has_unit_eigenvalue():
    state = random_product_state(17, p=4)
    cell = np.eye(1)
    for k in range(4):
        t = state.site_tensor(k)
        cell = cell @ _site_transfer(t, t)
    mu, _ = dominant_eigenpair(lambda x: cell @ x, 1, tol=1e-12)
    assert abs(mu - 1.0) < 1e-10


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 16), seed=st.integers(0, 2**32 - 1))
def test_power_iteration_matches_full_diagonalization(n, seed):
    rng = np.random.default_rng(seed)
    # entrywise-positive matrices have a simple Perron root, so no magnitude ties
    a = rng.random((n, n)) + 0.05
    ref = np.linalg.eigvals(a)
    order = np.sort(np.abs(ref))[::-1]
    mu, _ = dominant_eigenpair(lambda x: a @ x, n, tol=1e-13, max_iter=50_000, seed=seed)
    assert abs(abs(mu) - order[0]) < 1e-8


def test_power_iteration_rejects_bad_arguments():
    with pytest.raises(InvalidInputError):
        dominant_eigenpair(lambda x: x, 0)
    with pytest.raises(InvalidInputError):
        dominant_eigenpair(lambda x: x, 2, tol=0.0)
