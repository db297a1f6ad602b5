"""Reduced Arnoldi-Tikhonov solves and the full-dimensional Tikhonov oracle."""

from dataclasses import dataclass

import numpy as np

from .dense import DimensionError, RankDeficientError, qr_lstsq

__all__ = ["ReducedSolution", "solve_reduced", "full_tikhonov", "lift"]


@dataclass
class ReducedSolution:
    """Minimizer ``y`` of ``||Hbar y - beta e_1||^2 + lambda^2 ||L_m y||^2``."""

    y: np.ndarray
    lam: float
    residual_norm: float
    lifted: np.ndarray = None


def _stacked_system(Hbar, Lm, beta, lam):
    M = np.vstack([Hbar, lam * Lm])
    rhs = np.zeros(M.shape[0])
    rhs[0] = beta
    return M, rhs


def solve_reduced(Hbar, Lm, beta, lam):
    """Solve the projected Tikhonov problem as a stacked least-squares system.

    ``min || [Hbar; lam L_m] y - [beta e_1; 0] ||`` is solved with Householder
    QR. With ``lam > 0`` only an exactly singular stacked matrix is rejected,
    since the regularized problem is well posed even when ``Hbar`` is
    numerically rank deficient.
    """
    Hbar = np.asarray(Hbar, dtype=float)
    Lm = np.asarray(Lm, dtype=float)
    mp1, m = Hbar.shape
    if mp1 != m + 1:
        raise DimensionError(f"Hbar must be (m+1) x m, got {Hbar.shape}")
    if Lm.shape != (m, m):
        raise DimensionError(f"L_m must be {m} x {m}, got {Lm.shape}")
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    if beta <= 0:
        raise ValueError("beta = ||b|| must be positive")
    M, rhs = _stacked_system(Hbar, Lm, beta, lam)
    y = qr_lstsq(M, rhs, rtol=1e-12 if lam == 0 else 0.0)
    r = Hbar @ y
    r[0] -= beta
    return ReducedSolution(y=y, lam=float(lam), residual_norm=float(np.linalg.norm(r)))


def full_tikhonov(A, L, b, lam):
    """Dense Tikhonov solution, i.e. of ``(A^T A + lam^2 L^T L) x = A^T b``.

    Solved through the equivalent stacked least-squares problem
    ``[A; lam L] x ~ [b; 0]`` for accuracy.

    Raises
    ------
    RankDeficientError
        If the normal matrix is singular to working precision.
    """
    A = np.asarray(A, dtype=float)
    L = np.asarray(L, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.shape[1] != L.shape[1] or A.shape[0] != b.size:
        raise DimensionError(f"incompatible shapes A{A.shape}, L{L.shape}, b{b.shape}")
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    M = np.vstack([A, lam * L])
    rhs = np.concatenate([b, np.zeros(L.shape[0])])
    n = A.shape[1]
    try:
        return qr_lstsq(M, rhs, rtol=n * np.finfo(float).eps)
    except RankDeficientError as exc:
        raise RankDeficientError(f"normal matrix is singular at lambda = {lam:g}") from exc


def lift(state, y):
    """Map reduced coordinates back to ``x = W_m y``."""
    y = np.asarray(y, dtype=float)
    if y.shape != (state.m,):
        raise DimensionError(f"y has shape {y.shape}, expected ({state.m},)")
    return state.Wm @ y
