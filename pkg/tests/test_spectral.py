import numpy as np
import pytest
from numpy.testing import assert_allclose

from atgcv.arnoldi import ArnoldiBreakdownError, arnoldi, project_regularizer
from atgcv.dense import gsvd
from atgcv.problems import PROBLEMS, deriv1, make_problem
from atgcv.spectral import (
    aposteriori_bound,
    approx_gsvd,
    approx_svd,
    galerkin_residual,
    gsvd_galerkin_residual,
    gsvd_projection_residual,
    krylov_projection_error,
    svd_approx_error,
    transpose_projection_bound,
    transpose_residual,
)


def _state(name, m, variant="mgs", N=32):
    p = make_problem(name, N)
    return p, arnoldi(p.A, p.b_exact, m, variant=variant)


def test_diagonal_breaks_down_with_exact_value():
    A = np.diag([-3.0, 2.0, 1.0])
    s = arnoldi(A, np.array([1.0, 0.0, 0.0]), 3)
    assert s.m == 1 and s.breakdown
    assert approx_svd(s).sigma[0] == pytest.approx(3.0)


@pytest.mark.parametrize("name", PROBLEMS)
@pytest.mark.parametrize("m", [2, 4, 8])
def test_truncated_svd_identity(name, m):
    p, s = _state(name, m)
    e1 = svd_approx_error(s, p.A)
    e2 = krylov_projection_error(s, p.A)
    assert abs(e1 - e2) <= 1e-9 * e2


def test_triplet_orthonormal_and_sorted():
    p, s = _state("baart", 6)
    t = approx_svd(s)
    assert_allclose(t.Ubar.T @ t.Ubar, np.eye(7), atol=1e-8)
    assert_allclose(t.Vbar.T @ t.Vbar, np.eye(6), atol=1e-8)
    assert np.all(np.diff(t.sigma) <= 0)
    sq = approx_svd(s, square=True)
    assert sq.Ubar.shape == (32, 6)


def test_leading_singular_value_converges():
    p, s = _state("shaw", 6)
    s1 = np.linalg.svd(p.A, compute_uv=False)[0]
    assert abs(approx_svd(s).sigma[0] - s1) <= 1e-6 * s1


def test_leading_singular_value_monotone():
    p = make_problem("wing", 32)
    s = arnoldi(p.A, p.b_exact, 8)
    vals = [approx_svd(s.truncated(m)).sigma[0] for m in range(1, s.m + 1)]
    assert np.all(np.diff(vals) >= -1e-12)


@pytest.mark.parametrize("name", PROBLEMS)
def test_galerkin_residuals_vanish(name):
    p, s = _state(name, 8)
    nA = np.linalg.norm(p.A, 2)
    t = approx_svd(s)
    for k in range(1, s.m + 1):
        r1, r2 = galerkin_residual(s, p.A, k, triplet=t)
        assert r1 <= 1e-9 * nA and r2 <= 1e-9 * nA


def test_symmetric_full_transpose_residual():
    p, s = _state("shaw", 6)
    nA = np.linalg.norm(p.A, 2)
    for k in range(1, 7):
        assert transpose_residual(s, p.A, k) <= transpose_projection_bound(s, p.A) + 1e-9 * nA


def test_square_residual_bounded_by_subdiagonal():
    p, s = _state("foxgood", 6)
    t = approx_svd(s, square=True)
    for k in range(1, 7):
        u, v = t.Ubar[:, k - 1], t.Vbar[:, k - 1]
        assert np.linalg.norm(p.A @ v - t.sigma[k - 1] * u) <= s.h_next + 1e-10


def test_transpose_residual_bound():
    p, s = _state("baart", 6)
    bound = transpose_projection_bound(s, p.A)
    for k in range(1, 7):
        assert transpose_residual(s, p.A, k) <= bound + 1e-10


def test_baart_transpose_residual_vs_aposteriori():
    p, s = _state("baart", 5)
    assert transpose_residual(s, p.A, 1) <= aposteriori_bound(s, p.A)


def test_aposteriori_rejects_breakdown():
    s = arnoldi(np.eye(4), np.ones(4), 2)
    with pytest.raises(ArnoldiBreakdownError):
        aposteriori_bound(s)


def test_aposteriori_invariant_block():
    A = np.zeros((6, 6))
    A[:3, :3] = [[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]]
    A[3:, 3:] = np.diag([5.0, 6.0, 7.0])
    s = arnoldi(A, np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]), 2)
    assert not s.breakdown
    # w_3 completes the invariant block, so A w_3 has no component outside W_3... apart from W_3 itself
    s3 = arnoldi(A, np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]), 3, breakdown_rtol=0.0)
    assert np.linalg.norm(A @ s3.W[:, :3] - s3.W[:, :3] @ (s3.W[:, :3].T @ A @ s3.W[:, :3])) <= 1e-12


def test_aposteriori_trend_on_wing():
    p = make_problem("wing", 32)
    s = arnoldi(p.A, p.b_exact, 8, variant="householder")
    top = s.m if not s.breakdown else s.m - 1
    bounds = [aposteriori_bound(s.truncated(m), p.A) for m in range(2, top + 1)]
    errors = [svd_approx_error(s.truncated(m), p.A) for m in range(2, top + 1)]
    assert bounds[-1] < bounds[0]
    # the single-column estimate underestimates the true approximation error
    assert np.all(np.array(bounds) <= np.array(errors) * (1 + 1e-8))


def test_k_range_checked():
    p, s = _state("shaw", 3)
    with pytest.raises(IndexError):
        galerkin_residual(s, p.A, 4)
    with pytest.raises(IndexError):
        galerkin_residual(s, p.A, 0)


def test_noise_stop_predicate():
    p, s = _state("shaw", 8)
    t = approx_svd(s)
    beta = s.beta
    assert not t.noise_stop(0.0, beta)
    assert t.noise_stop(1.0, 1e6)
    mask = t.below_noise(1e-2, beta)
    assert_allclose(mask, t.sigma < 1e-2 * beta)


# -- generalized triplets -------------------------------------------------------------
def test_identity_regularizer_gives_svd():
    p, s = _state("wing", 6)
    g = approx_gsvd(s, np.eye(6))
    sigma = approx_svd(s).sigma
    assert_allclose(np.sort(g.gamma)[::-1], sigma, rtol=1e-9, atol=1e-9 * sigma[0])


@pytest.mark.parametrize("name", PROBLEMS)
def test_gsvd_galerkin_residuals(name):
    p, s = _state(name, 8)
    L = deriv1(32)
    nA = np.linalg.norm(p.A, 2)
    t = approx_gsvd(s, project_regularizer(L, s))
    for k in range(1, s.m + 1):
        g1, g2 = gsvd_galerkin_residual(s, L, k, triplet=t)
        scale = nA * max(1.0, np.linalg.norm(t.Xbar[:, k - 1]))
        assert g1 <= 1e-9 * scale and g2 <= 1e-9 * scale


def test_leading_gamma_converges_with_m():
    # projected values approach the dense ones; by m = 12 the four leading finite
    # values agree to 1e-4 (rank 1 pairs with the null direction of deriv1)
    p = make_problem("shaw", 32)
    L = deriv1(32)
    dense = np.sort(gsvd(p.A, L).gamma)[::-1]
    s = arnoldi(p.A, p.b_exact, 12, variant="householder")
    proj = np.sort(approx_gsvd(s, project_regularizer(L, s)).gamma)[::-1]
    assert np.isinf(dense[0])
    assert_allclose(proj[1:5], dense[1:5], rtol=1e-4)


def test_gsvd_projection_residual_identity_and_zero():
    p, s = _state("shaw", 5)
    res, bound = gsvd_projection_residual(s, np.eye(32), 1)
    assert res <= 1e-10 and bound <= 1e-14
    res0, bound0 = gsvd_projection_residual(s, np.zeros((32, 32)), 2)
    assert res0 == 0.0 and bound0 == 0.0


def test_gsvd_projection_residual_bound_holds():
    p, s = _state("shaw", 6)
    L = deriv1(32)
    for k in range(1, 7):
        res, bound = gsvd_projection_residual(s, L, k)
        assert res <= bound + 1e-10
    res, bound = gsvd_projection_residual(s, L, 1)
    assert bound - res > 0  # measurable slack
