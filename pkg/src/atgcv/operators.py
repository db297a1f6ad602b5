"""Matrix-free operator helpers built on :class:`scipy.sparse.linalg.LinearOperator`."""

import numpy as np
from scipy.sparse.linalg import LinearOperator, aslinearoperator

__all__ = ["LinearOperator", "as_operator", "to_dense", "KroneckerSum", "KroneckerProduct"]


def as_operator(A):
    """Wrap a dense array (or pass through an existing operator)."""
    if isinstance(A, LinearOperator):
        return A
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {A.shape}")
    return aslinearoperator(A)


def to_dense(op):
    """Explicit matrix of an operator; cheap when the operator wraps an array."""
    if isinstance(op, np.ndarray):
        return np.asarray(op, dtype=float)
    A = getattr(op, "A", None)
    if isinstance(A, np.ndarray):
        return np.asarray(A, dtype=float)
    if hasattr(op, "todense"):
        return op.todense()
    return op.matmat(np.eye(op.shape[1]))


class KroneckerProduct(LinearOperator):
    """``kron(B, C)`` acting on column-stacked ``n1 x n2`` images.

    With ``x = vec(X)`` (Fortran order), ``kron(B, C) x = vec(C X B^T)``.
    """

    def __init__(self, B, C):
        self.B = np.asarray(B, dtype=float)
        self.C = np.asarray(C, dtype=float)
        shape = (self.B.shape[0] * self.C.shape[0], self.B.shape[1] * self.C.shape[1])
        super().__init__(dtype=np.float64, shape=shape)

    def _matvec(self, x):
        X = np.reshape(x, (self.C.shape[1], self.B.shape[1]), order="F")
        return np.ravel(self.C @ X @ self.B.T, order="F")

    def _rmatvec(self, y):
        Y = np.reshape(y, (self.C.shape[0], self.B.shape[0]), order="F")
        return np.ravel(self.C.T @ Y @ self.B, order="F")

    def todense(self):
        return np.kron(self.B, self.C)


class KroneckerSum(LinearOperator):
    """``kron(I, L1) + kron(L1, I)`` on column-stacked ``n x n`` images."""

    def __init__(self, L1):
        self.L1 = np.asarray(L1, dtype=float)
        n = self.L1.shape[0]
        if self.L1.shape != (n, n):
            raise ValueError("L1 must be square")
        self.n = n
        super().__init__(dtype=np.float64, shape=(n * n, n * n))

    def _matvec(self, x):
        X = np.reshape(x, (self.n, self.n), order="F")
        return np.ravel(self.L1 @ X + X @ self.L1.T, order="F")

    def _rmatvec(self, y):
        Y = np.reshape(y, (self.n, self.n), order="F")
        return np.ravel(self.L1.T @ Y + Y @ self.L1, order="F")

    def todense(self):
        eye = np.eye(self.n)
        return np.kron(eye, self.L1) + np.kron(self.L1, eye)
