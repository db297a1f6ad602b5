import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from atgcv.arnoldi import (
    ArnoldiBreakdownError,
    DecayModel,
    ProjectedRegularizer,
    arnoldi,
    arnoldi_extend,
    arnoldi_start,
    decay_bound,
    decay_product,
    pad_regularizer,
    project_regularizer,
)
from atgcv.problems import PROBLEMS, deriv1, make_problem

VARIANTS = ["mgs", "householder"]


def test_start_normalizes():
    s = arnoldi_start(np.eye(3), np.array([3.0, 0.0, 0.0]))
    assert s.m == 0
    assert_allclose(s.W[:, 0], [1.0, 0.0, 0.0])


@pytest.mark.parametrize("variant", VARIANTS)
def test_start_unit_and_shaw(variant):
    p = make_problem("shaw", 32)
    s = arnoldi_start(p.A, p.b_exact, variant=variant)
    assert abs(np.linalg.norm(s.W[:, 0]) - 1.0) <= 1e-15
    assert np.max(np.abs(s.W[:, 0] - p.b_exact / np.linalg.norm(p.b_exact))) <= 1e-15
    s2 = arnoldi_start(np.eye(2), np.array([1.0, 1.0]), variant=variant)
    assert abs(np.linalg.norm(s2.W[:, 0]) - 1.0) <= 1e-15


def test_start_rejects_zero_and_bad_shapes():
    with pytest.raises(ValueError):
        arnoldi_start(np.eye(3), np.zeros(3))
    with pytest.raises(ValueError):
        arnoldi_start(np.ones((3, 2)), np.ones(3))
    with pytest.raises(ValueError):
        arnoldi_start(np.eye(3), np.ones(2))
    with pytest.raises(ValueError):
        arnoldi_start(np.eye(3), np.ones(3), variant="cgs")


@pytest.mark.parametrize("variant", VARIANTS)
def test_identity_breaks_down_immediately(variant):
    s = arnoldi_extend(arnoldi_start(np.eye(4), np.arange(1.0, 5.0), variant=variant))
    assert s.m == 1 and s.breakdown
    with pytest.raises(ArnoldiBreakdownError):
        s.extend()


@pytest.mark.parametrize("variant", VARIANTS)
def test_hand_gram_schmidt(variant):
    s = arnoldi(np.diag([1.0, 2.0]), np.array([1.0, 1.0]), 1, variant=variant)
    assert_allclose(s.Hbar, [[1.5], [0.5]], atol=1e-15)


@pytest.mark.parametrize("variant", VARIANTS)
@pytest.mark.parametrize("name", PROBLEMS)
@pytest.mark.parametrize("N", [16, 32, 64])
def test_factorization_and_orthonormality(variant, name, N):
    if name == "shaw" and N % 2:
        pytest.skip("shaw needs even N")
    p = make_problem(name, N)
    s = arnoldi(p.A, p.b_exact, 10, variant=variant)
    nA = np.linalg.norm(p.A, 2)
    assert np.linalg.norm(p.A @ s.Wm - s.W @ s.Hbar) <= 1e-10 * nA
    assert np.max(np.abs(s.W.T @ s.W - np.eye(s.m + 1))) <= 1e-10
    assert abs(np.linalg.norm(s.Wm @ s.Wm.T, 2) - 1.0) <= 1e-10
    # upper Hessenberg with non-negative subdiagonal
    assert np.all(np.tril(s.Hbar, -2) == 0.0)
    assert np.all(s.subdiag >= 0.0)


def test_householder_dec2_shaw_m10():
    p = make_problem("shaw", 32)
    s = arnoldi(p.A, p.b_exact, 10, variant="householder")
    assert s.m == 10
    assert np.linalg.norm(p.A @ s.Wm - s.W @ s.Hbar) <= 1e-10


@pytest.mark.parametrize("variant", VARIANTS)
def test_full_dimension_stores_zero_next_vector(variant):
    p = make_problem("baart", 12)
    s = arnoldi(p.A, p.b_exact, 12, variant=variant, breakdown_rtol=0.0)
    assert s.m == 12 and s.breakdown
    assert_allclose(s.W[:, -1], 0.0)
    assert np.linalg.norm(p.A @ s.Wm - s.Wm @ s.H) <= 1e-12 * np.linalg.norm(p.A)
    with pytest.raises(ArnoldiBreakdownError):
        s.extend()


@pytest.mark.parametrize("variant", VARIANTS)
def test_breakdown_completion_vector_is_orthonormal(variant):
    # b lives in an invariant 2-D block; breakdown at m = 2 < N
    A = np.zeros((5, 5))
    A[:2, :2] = [[2.0, 1.0], [1.0, 3.0]]
    A[2:, 2:] = np.diag([4.0, 5.0, 6.0])
    s = arnoldi(A, np.array([1.0, 0.5, 0.0, 0.0, 0.0]), 5, variant=variant)
    assert s.m == 2 and s.breakdown
    assert_allclose(s.W.T @ s.W, np.eye(3), atol=1e-14)
    assert np.linalg.norm(A @ s.Wm - s.W @ s.Hbar) <= 1e-14


def test_truncated_copy_is_independent():
    p = make_problem("shaw", 32)
    s = arnoldi(p.A, p.b_exact, 8)
    t = s.truncated(5)
    assert t.m == 5
    assert_allclose(t.Hbar, s.Hbar[:6, :5])
    t.extend()
    assert s.m == 8
    assert_allclose(t.Hbar, s.Hbar[:7, :6], atol=1e-12)
    with pytest.raises(ValueError):
        s.truncated(9)


def test_h_next_requires_a_step():
    with pytest.raises(ValueError):
        arnoldi_start(np.eye(2), np.ones(2)).h_next


def test_variants_agree_up_to_signs():
    p = make_problem("wing", 32)
    a = arnoldi(p.A, p.b_exact, 6, variant="mgs")
    b = arnoldi(p.A, p.b_exact, 6, variant="householder")
    assert_allclose(np.abs(a.Hbar), np.abs(b.Hbar), atol=1e-10)


# -- regularizer projection -----------------------------------------------------
def test_project_identity_and_zero():
    p = make_problem("shaw", 32)
    s = arnoldi(p.A, p.b_exact, 5)
    assert_allclose(project_regularizer(np.eye(32), s), np.eye(5), atol=1e-12)
    assert_allclose(project_regularizer(np.zeros((32, 32)), s), 0.0)


def test_project_deriv1_dense_oracle():
    p = make_problem("shaw", 32)
    s = arnoldi(p.A, p.b_exact, 5)
    L = deriv1(32)
    assert np.max(np.abs(project_regularizer(L, s) - s.Wm.T @ L @ s.Wm)) <= 1e-12


def test_incremental_projection_matches_direct():
    p = make_problem("baart", 32)
    L = deriv1(32)
    s = arnoldi_start(p.A, p.b_exact)
    pr = ProjectedRegularizer(L, 32)
    for _ in range(7):
        s.extend()
        assert_allclose(pr.update(s), s.Wm.T @ L @ s.Wm, atol=1e-14)


def test_pad_regularizer():
    L = np.eye(3, 4) - np.eye(3, 4, k=1)
    Lp = pad_regularizer(L, 4)
    assert Lp.shape == (4, 4)
    assert_allclose(Lp[3], 0.0)
    assert pad_regularizer(np.eye(4), 4) is not None
    with pytest.raises(ValueError):
        pad_regularizer(np.eye(5), 4)
    with pytest.raises(ValueError):
        project_regularizer(L, arnoldi(np.eye(4) * 2 + np.eye(4, k=1), np.ones(4), 2))


# -- decay diagnostics ------------------------------------------------------------
class _FakeState:
    def __init__(self, sub):
        self.subdiag = np.asarray(sub, dtype=float)
        self.m = self.subdiag.size


def test_decay_product_examples():
    assert decay_product(_FakeState([1.0, 1.0, 1.0])) == pytest.approx(1.0)
    assert decay_product(_FakeState([4.0, 1.0]), 2) == pytest.approx(2.0)
    assert decay_product(_FakeState([4.0, 0.0])) == 0.0
    with pytest.raises(ValueError):
        decay_product(_FakeState([1.0]), 0)
    with pytest.raises(ValueError):
        decay_product(_FakeState([1.0]), 2)


def test_decay_bound_formula():
    # exponent vanishes when m alpha / e^2 = (alpha + 2) / 2
    alpha = 2.0
    m = (alpha + 2.0) / 2.0 * math.e**2 / alpha
    assert decay_bound(DecayModel(alpha, 1.0), m) == pytest.approx(1.0)
    model = DecayModel(1.5, 3.0)
    for m in (1, 3, 7):
        d = math.log(decay_bound(model, 2 * m)) - math.log(decay_bound(model, m))
        assert d == pytest.approx(-m * 1.5 / math.e**2)
    with pytest.raises(ValueError):
        decay_bound(model, 0)
    with pytest.raises(ValueError):
        DecayModel(-1.0, 1.0)
    assert DecayModel.fitted(2.0, 0.5).k == pytest.approx(0.5 * math.e**2)


def test_shaw_decay_product_strictly_decreasing():
    p = make_problem("shaw", 32)
    s = arnoldi(p.A, p.b_exact, 8, variant="householder")
    d = [decay_product(s, m) for m in range(2, 9)]
    assert np.all(np.diff(d) < 0)


@pytest.mark.parametrize("name, alpha", [("shaw", 2.0), ("wing", 4.5)])
def test_decay_bound_dominates(name, alpha):
    p = make_problem(name, 32)
    sigma = np.linalg.svd(p.A, compute_uv=False)
    model = DecayModel.fitted(alpha, sigma[0])
    s = arnoldi(p.A, p.b_exact, 10, variant="householder")
    for m in range(2, s.m + 1):
        assert decay_product(s, m) <= decay_bound(model, m)
    for m in range(1, s.m + 1):
        assert s.subdiag[m - 1] <= 10.0 * math.sqrt(m) * sigma[m - 1]
