"""Dense linear algebra kernels.

Everything here works on small-to-moderate dense ``float64`` arrays: the
projected matrices produced by the Arnoldi process and the full-size oracle
problems used for verification. The large operator itself is only ever applied
matrix-free.
"""

import numpy as np

__all__ = [
    "DimensionError",
    "RankDeficientError",
    "ConvergenceError",
    "SvdFactors",
    "GsvdPair",
    "matvec",
    "qr_lstsq",
    "svd",
    "gsvd",
    "spectral_norm",
]

RANK_RTOL = 1e-12


class DimensionError(ValueError):
    """Raised when array shapes are incompatible."""


class RankDeficientError(np.linalg.LinAlgError):
    """Raised when a triangular factor has a negligible diagonal entry."""


class ConvergenceError(np.linalg.LinAlgError):
    """Raised when an iterative factorization fails to converge."""


def _as_matrix(A):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or 0 in A.shape:
        raise DimensionError(f"expected a non-empty 2-D array, got shape {A.shape}")
    return A


def _as_vector(x):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise DimensionError(f"expected a non-empty 1-D array, got shape {x.shape}")
    return x


def matvec(A, x):
    """Dense matrix-vector product with shape checking."""
    A = _as_matrix(A)
    x = _as_vector(x)
    if A.shape[1] != x.size:
        raise DimensionError(f"cannot multiply {A.shape} by vector of length {x.size}")
    return A @ x


def qr_lstsq(A, b, rtol=RANK_RTOL):
    """Least-squares solution of ``min ||A x - b||`` via Householder QR.

    Parameters
    ----------
    A : (M, n) array_like
        Coefficient matrix with ``M >= n``.
    b : (M,) array_like
        Right-hand side.
    rtol : float
        A diagonal entry of ``R`` with ``|R_ii| <= rtol * max |R_jj|`` is taken
        as a sign of rank deficiency. Pass ``0`` to reject only exact zeros.

    Returns
    -------
    x : (n,) ndarray

    Raises
    ------
    RankDeficientError
        If ``A`` is numerically rank deficient.
    """
    A = _as_matrix(A)
    b = _as_vector(b)
    M, n = A.shape
    if M < n:
        raise DimensionError(f"qr_lstsq needs rows >= cols, got {A.shape}")
    if b.size != M:
        raise DimensionError(f"right-hand side has length {b.size}, expected {M}")
    # LAPACK geqrf: Householder reflections
    Q, R = np.linalg.qr(A, mode="reduced")
    d = np.abs(np.diag(R))
    if d.max() == 0.0 or d.min() <= rtol * d.max():
        raise RankDeficientError(
            f"matrix is rank deficient: min |R_ii| = {d.min():.3e}, max = {d.max():.3e}"
        )
    return _back_substitute(R, Q.T @ b)


def _back_substitute(R, y):
    n = R.shape[0]
    x = np.empty(n)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - R[i, i + 1:] @ x[i + 1:]) / R[i, i]
    return x


class SvdFactors:
    """Thin SVD ``A = U diag(s) V^T`` with non-increasing ``s``."""

    def __init__(self, U, singular_values, V):
        self.U = U
        self.singular_values = singular_values
        self.V = V

    def __iter__(self):
        return iter((self.U, self.singular_values, self.V))

    def reconstruct(self):
        return (self.U * self.singular_values) @ self.V.T


def svd(A, full_matrices=False):
    """Singular value decomposition.

    Backed by LAPACK ``gesdd`` (Householder bidiagonalization followed by
    divide-and-conquer on the bidiagonal). Non-convergence is reported as
    :class:`ConvergenceError`.
    """
    A = _as_matrix(A)
    if not np.all(np.isfinite(A)):
        raise ValueError("svd input contains non-finite entries")
    try:
        U, s, Vt = np.linalg.svd(A, full_matrices=full_matrices)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(str(exc)) from exc
    return SvdFactors(U, s, Vt.T)


def spectral_norm(A):
    """Largest singular value of ``A``."""
    return float(svd(A).singular_values[0])


class GsvdPair:
    """Generalized SVD of a pair ``(A, B)`` sharing ``n`` columns.

    ``A X = U[:, :n] diag(s)`` and ``B X = V[:, :n] diag(c)`` with
    ``s**2 + c**2 = 1``. Indices are ordered by increasing ``s`` (decreasing
    ``c``), so ``gamma = s / c`` is non-decreasing; ``gamma`` is ``inf`` where
    ``c == 0``. When either matrix has fewer rows than columns it is padded
    with zero rows first, and ``U``/``V`` refer to the padded matrix.

    Attributes
    ----------
    U : (M, M) ndarray
        Orthogonal. Columns past ``n`` complete the basis of ``R^M``.
    V : (P, n) ndarray
        Orthonormal columns.
    X : (n, n) ndarray
        Nonsingular.
    s, c, gamma : (n,) ndarray
    """

    def __init__(self, U, V, X, s, c):
        self.U = U
        self.V = V
        self.X = X
        self.s = s
        self.c = c
        with np.errstate(divide="ignore"):
            self.gamma = np.where(c > 0, s / np.where(c > 0, c, 1.0), np.inf)

    @property
    def finite(self):
        """Mask of indices with a finite generalized singular value."""
        return np.isfinite(self.gamma)


def gsvd(A, B, rtol=RANK_RTOL):
    """Generalized singular value decomposition of ``(A, B)``.

    The stacked matrix ``[A; B]`` is factored as ``Q R``; the top block of
    ``Q`` is diagonalized by an SVD (the cosine-sine step) and the bottom
    block is re-orthonormalized with a second QR. ``X = R^{-1} Z``.

    Raises
    ------
    RankDeficientError
        If ``[A; B]`` does not have full column rank.
    """
    A = _as_matrix(A)
    B = _as_matrix(B)
    M, n = A.shape
    if B.shape[1] != n:
        raise DimensionError(f"column mismatch: {A.shape} vs {B.shape}")
    if M < n:
        A = np.vstack([A, np.zeros((n - M, n))])
    if B.shape[0] < n:
        B = np.vstack([B, np.zeros((n - B.shape[0], n))])
    Mp = A.shape[0]

    Q, R = np.linalg.qr(np.vstack([A, B]), mode="reduced")
    d = np.abs(np.diag(R))
    if d.max() == 0.0 or d.min() <= rtol * d.max():
        raise RankDeficientError("stacked matrix [A; B] is rank deficient")
    Q1, Q2 = Q[:Mp], Q[Mp:]

    U, s, Zt = np.linalg.svd(Q1, full_matrices=True)
    # ascending s <=> descending c
    order = np.arange(n)[::-1]
    s = np.clip(s[order], 0.0, 1.0)
    Z = Zt.T[:, order]
    U = np.hstack([U[:, :n][:, order], U[:, n:]])

    V, Rv = np.linalg.qr(Q2 @ Z, mode="reduced")
    c = np.diag(Rv).copy()
    sign = np.where(c < 0, -1.0, 1.0)
    V = V * sign
    c = np.abs(c)
    X = np.linalg.solve(R, Z)
    return GsvdPair(U, V, X, s, c)
