"""Randomized properties over small dense inputs."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from atgcv.arnoldi import arnoldi
from atgcv.dense import gsvd
from atgcv.gcv import ProjectedGcv, gcv_full
from atgcv.operators import KroneckerProduct
from atgcv.pgm import from_gray, to_gray
from atgcv.problems import add_noise
from atgcv.tikhonov import full_tikhonov, solve_reduced

seeds = st.integers(0, 2**32 - 1)
sizes = st.integers(3, 10)
lams = st.floats(1e-4, 1e2)


def _matrix(seed, n, shift=0.0):
    return np.random.default_rng(seed).standard_normal((n, n)) + shift * np.eye(n)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, n=sizes, m=st.integers(1, 8), variant=st.sampled_from(["mgs", "householder"]))
def test_arnoldi_factorization(seed, n, m, variant):
    A = _matrix(seed, n)
    b = np.random.default_rng(seed + 1).standard_normal(n)
    s = arnoldi(A, b, m, variant=variant)
    nA = np.linalg.norm(A, 2)
    assert np.linalg.norm(A @ s.Wm - s.W @ s.Hbar) <= 1e-10 * nA
    assert np.max(np.abs(s.Wm.T @ s.Wm - np.eye(s.m))) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(seed=seeds, n=sizes)
def test_gsvd_reconstructs(seed, n):
    A = _matrix(seed, n)
    B = _matrix(seed + 7, n)
    p = gsvd(A, B)
    scale = np.linalg.norm(np.vstack([A, B]), 2) * np.linalg.norm(p.X, 2)
    assert np.linalg.norm(A @ p.X - p.U[:, :n] * p.s) <= 1e-10 * scale
    assert np.linalg.norm(B @ p.X - p.V[:, :n] * p.c) <= 1e-10 * scale
    assert np.all(np.diff(p.gamma) >= 0)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, n=sizes, lam=lams)
def test_full_tikhonov_normal_equations(seed, n, lam):
    A = _matrix(seed, n)
    L = _matrix(seed + 3, n)
    b = np.random.default_rng(seed + 5).standard_normal(n)
    x = full_tikhonov(A, L, b, lam)
    grad = A.T @ (A @ x - b) + lam**2 * (L.T @ (L @ x))
    scale = (np.linalg.norm(A, 2) ** 2 + lam**2 * np.linalg.norm(L, 2) ** 2) * max(np.linalg.norm(x), 1.0)
    assert np.linalg.norm(grad) <= 1e-9 * scale


@settings(max_examples=40, deadline=None)
@given(seed=seeds, m=st.integers(1, 6), lam=lams, beta=st.floats(1e-3, 1e3))
def test_reduced_residual_between_limits(seed, m, lam, beta):
    rng = np.random.default_rng(seed)
    Hbar = np.triu(rng.standard_normal((m + 1, m)), -1)
    sol = solve_reduced(Hbar, np.eye(m), beta, lam)
    # regularization can only raise the residual above the least-squares one and never above beta
    ls = solve_reduced(Hbar, np.eye(m), beta, 1e-12)
    assert ls.residual_norm * (1 - 1e-8) <= sol.residual_norm <= beta * (1 + 1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, n=sizes, lam=lams, c=st.floats(1e-3, 1e3))
def test_gcv_scale_covariance(seed, n, lam, c):
    A = _matrix(seed, n)
    b = np.random.default_rng(seed + 2).standard_normal(n)
    pair = gsvd(A, np.eye(n))
    Utb = pair.U.T @ b
    assert np.isclose(gcv_full(pair, c * Utb, lam), c**2 * gcv_full(pair, Utb, lam), rtol=1e-12)
    s = arnoldi(A, b, min(3, n - 1))
    G = ProjectedGcv(s.Hbar, np.eye(s.m), s.beta, n)
    Gc = ProjectedGcv(s.Hbar, np.eye(s.m), c * s.beta, n)
    assert np.isclose(Gc(lam), c**2 * G(lam), rtol=1e-10)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, n=st.integers(1, 50), level=st.floats(0.0, 1.0))
def test_noise_norm_exact(seed, n, level):
    b = np.random.default_rng(seed).uniform(0.5, 1.5, n)
    e = add_noise(b, level, seed) - b
    assert abs(np.linalg.norm(e) - level * np.linalg.norm(b)) <= 1e-12 * np.linalg.norm(b)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, p=st.integers(1, 5), q=st.integers(1, 5))
def test_kronecker_product_matches_kron(seed, p, q):
    rng = np.random.default_rng(seed)
    B, C = rng.standard_normal((p, p)), rng.standard_normal((q, q))
    x = rng.standard_normal(p * q)
    op = KroneckerProduct(B, C)
    assert np.allclose(op.matvec(x), np.kron(B, C) @ x, atol=1e-12)
    assert np.allclose(op.rmatvec(x), np.kron(B, C).T @ x, atol=1e-12)


@given(st.lists(st.integers(0, 255), min_size=1, max_size=64))
def test_gray_round_trip(values):
    q = np.array(values, dtype=np.uint8)
    assert np.array_equal(from_gray(to_gray(q)), q)
