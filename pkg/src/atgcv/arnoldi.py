"""Arnoldi decomposition ``A W_m = W_{m+1} Hbar_m`` built one column at a time.

Two orthogonalization schemes share one interface:

* ``"mgs"``: modified Gram-Schmidt with one full reorthogonalization pass.
* ``"householder"``: Walker's Householder Arnoldi, orthogonal to working
  precision regardless of conditioning.
"""

import math
from dataclasses import dataclass

import numpy as np

from .operators import as_operator

__all__ = [
    "VARIANTS",
    "ArnoldiBreakdownError",
    "ArnoldiDecomposition",
    "arnoldi_start",
    "arnoldi_extend",
    "arnoldi",
    "pad_regularizer",
    "project_regularizer",
    "ProjectedRegularizer",
    "DecayModel",
    "decay_product",
    "decay_bound",
]

VARIANTS = ("mgs", "householder")
BREAKDOWN_RTOL = 1e-14


class ArnoldiBreakdownError(RuntimeError):
    """Raised when extending a decomposition that can no longer grow."""


def _house(x):
    """Unit Householder vector ``v`` and ``alpha`` with ``(I - 2 v v^T) x = alpha e_1``."""
    nrm = np.linalg.norm(x)
    if nrm == 0.0:
        return None, 0.0
    alpha = -math.copysign(nrm, x[0])
    v = x.copy()
    v[0] -= alpha
    v /= np.linalg.norm(v)
    return v, alpha


class ArnoldiDecomposition:
    """Growing Krylov basis for ``K_m(A, b)``.

    Parameters
    ----------
    A : array_like or LinearOperator
        Square operator of dimension ``N``; only products ``A @ x`` are used.
    b : (N,) array_like
        Starting vector, ``||b|| > 0``.
    variant : {"mgs", "householder"}
    breakdown_rtol : float
        ``h_{m+1,m}`` at or below ``breakdown_rtol * max_j ||A w_j||`` flags a
        breakdown. With ``0`` only an exactly vanishing subdiagonal (always the
        case at ``m = N``) stops the process.

    Notes
    -----
    On breakdown at ``m < N`` the stored ``w_{m+1}`` is still a unit vector
    orthogonal to ``W_m``, so the factorization identity and the
    orthonormality of ``W_{m+1}`` keep holding. At ``m = N`` there is no room
    for one and ``w_{N+1}`` is stored as zero.
    """

    def __init__(self, A, b, variant="mgs", breakdown_rtol=BREAKDOWN_RTOL):
        if variant not in VARIANTS:
            raise ValueError(f"unknown Arnoldi variant {variant!r}; expected one of {VARIANTS}")
        self.A = as_operator(A)
        N = self.A.shape[0]
        if self.A.shape != (N, N):
            raise ValueError(f"operator must be square, got {self.A.shape}")
        b = np.asarray(b, dtype=float)
        if b.shape != (N,):
            raise ValueError(f"b has shape {b.shape}, expected ({N},)")
        beta = float(np.linalg.norm(b))
        if beta == 0.0:
            raise ValueError("starting vector b must be nonzero")

        self.N = N
        self.beta = beta
        self.variant = variant
        self.breakdown_rtol = breakdown_rtol
        self.m = 0
        self.breakdown = False
        self._scale = 0.0

        cap = min(N, 16) + 1
        self._W = np.zeros((N, cap))
        self._H = np.zeros((cap, cap - 1))
        if variant == "householder":
            v, alpha = _house(b)
            self._refl = [v]
            self._sign = [math.copysign(1.0, alpha)]
            self._W[:, 0] = self._householder_basis(0)
        else:
            self._W[:, 0] = b / beta

    # -- accessors -----------------------------------------------------------
    @property
    def W(self):
        """``N x (m+1)`` orthonormal basis ``W_{m+1}``."""
        return self._W[:, : self.m + 1]

    @property
    def Wm(self):
        """``N x m`` basis ``W_m``."""
        return self._W[:, : self.m]

    @property
    def Hbar(self):
        """``(m+1) x m`` upper Hessenberg matrix."""
        return self._H[: self.m + 1, : self.m]

    @property
    def H(self):
        """Square ``m x m`` leading block of ``Hbar``."""
        return self._H[: self.m, : self.m]

    @property
    def subdiag(self):
        """History ``h_{2,1}, ..., h_{m+1,m}``."""
        return np.diagonal(self.Hbar, offset=-1).copy()

    @property
    def h_next(self):
        """Last subdiagonal entry ``h_{m+1,m}``."""
        if self.m == 0:
            raise ValueError("no column has been computed yet")
        return float(self._H[self.m, self.m - 1])

    def e1_rhs(self):
        """``||b|| e_1`` of length ``m + 1``."""
        c = np.zeros(self.m + 1)
        c[0] = self.beta
        return c

    def truncated(self, m):
        """Independent copy holding only the first ``m`` steps."""
        if not 0 <= m <= self.m:
            raise ValueError(f"m = {m} outside 0..{self.m}")
        new = object.__new__(type(self))
        new.__dict__.update(self.__dict__)
        new._W = self._W[:, : m + 1].copy()
        new._H = self._H[: m + 1, :m].copy()
        new.m = m
        new.breakdown = self.breakdown and m == self.m
        if self.variant == "householder":
            new._refl = self._refl[: m + 1]
            new._sign = self._sign[: m + 1]
        return new

    # -- growth --------------------------------------------------------------
    def _grow(self):
        cap = self._W.shape[1]
        if self.m + 2 <= cap:
            return
        new = min(self.N + 1, 2 * cap)
        W = np.zeros((self.N, new))
        W[:, :cap] = self._W
        H = np.zeros((new, new - 1))
        H[:cap, : cap - 1] = self._H
        self._W, self._H = W, H

    def _householder_basis(self, j):
        y = np.zeros(self.N)
        y[j] = 1.0
        for i in range(j, -1, -1):
            v = self._refl[i]
            if v is not None:
                y[i:] -= 2.0 * v * (v @ y[i:])
        return self._sign[j] * y

    def extend(self):
        """Add one Arnoldi step; returns ``self``."""
        if self.breakdown:
            raise ArnoldiBreakdownError(f"cannot extend past breakdown at m = {self.m}")
        if self.m >= self.N:
            raise ArnoldiBreakdownError(f"Krylov dimension already equals N = {self.N}")
        self._grow()
        j = self.m
        Aw = np.asarray(self.A.matvec(self._W[:, j]), dtype=float).ravel()
        self._scale = max(self._scale, float(np.linalg.norm(Aw)))
        if self.variant == "householder":
            h, w_new = self._step_householder(j, Aw)
        else:
            h, w_new = self._step_mgs(j, Aw)
        self._H[: j + 2, j] = h
        self._W[:, j + 1] = w_new
        self.m = j + 1
        if self.m == self.N or h[j + 1] <= self.breakdown_rtol * self._scale:
            self.breakdown = True
        return self

    def _step_mgs(self, j, Aw):
        W = self._W[:, : j + 1]
        w = Aw.copy()
        h = np.zeros(j + 2)
        for _ in range(2):
            for i in range(j + 1):
                c = W[:, i] @ w
                h[i] += c
                w -= c * W[:, i]
        if j + 1 == self.N:
            return h, np.zeros(self.N)
        hn = float(np.linalg.norm(w))
        h[j + 1] = hn
        # at breakdown w is rounding noise; normalizing it would not give a vector orthogonal to W
        if hn > self.breakdown_rtol * self._scale and hn > 0.0:
            w /= hn
            w -= W @ (W.T @ w)
            w /= np.linalg.norm(w)
        else:
            w = self._complement(W)
        return h, w

    @staticmethod
    def _complement(W):
        # unit coordinate vector with the smallest projection onto range(W)
        k = int(np.argmin(np.sum(W * W, axis=1)))
        w = np.zeros(W.shape[0])
        w[k] = 1.0
        for _ in range(2):
            w -= W @ (W.T @ w)
        return w / np.linalg.norm(w)

    def _step_householder(self, j, Aw):
        z = Aw.copy()
        for i in range(j + 1):
            v = self._refl[i]
            if v is not None:
                z[i:] -= 2.0 * v * (v @ z[i:])
        h = np.zeros(j + 2)
        h[: j + 1] = z[: j + 1] * np.asarray(self._sign[: j + 1])
        if j + 1 == self.N:
            return h, np.zeros(self.N)
        v, alpha = _house(z[j + 1:])
        self._refl.append(v)
        self._sign.append(math.copysign(1.0, alpha))
        h[j + 1] = abs(alpha)
        return h, self._householder_basis(j + 1)


def arnoldi_start(A, b, variant="mgs", breakdown_rtol=BREAKDOWN_RTOL):
    """State with ``m = 0`` and ``w_1 = b / ||b||``."""
    return ArnoldiDecomposition(A, b, variant=variant, breakdown_rtol=breakdown_rtol)


def arnoldi_extend(state):
    """One more Arnoldi step (mutates and returns ``state``)."""
    return state.extend()


def arnoldi(A, b, m, variant="mgs", breakdown_rtol=BREAKDOWN_RTOL):
    """Run ``m`` steps, or fewer if the process breaks down."""
    state = arnoldi_start(A, b, variant=variant, breakdown_rtol=breakdown_rtol)
    while state.m < m and not state.breakdown:
        state.extend()
    return state


# -- regularization matrix ---------------------------------------------------
def pad_regularizer(L, N):
    """Append zero rows so a ``P x N`` regularization matrix becomes square."""
    L = np.asarray(L, dtype=float)
    P, n = L.shape
    if n != N or P > N:
        raise ValueError(f"cannot pad a {L.shape} matrix to {N} x {N}")
    if P == N:
        return L
    return np.vstack([L, np.zeros((N - P, N))])


def project_regularizer(L, state):
    """``L_m = W_m^T L W_m`` for a square ``N x N`` matrix or operator ``L``."""
    L = as_operator(L)
    if L.shape != (state.N, state.N):
        raise ValueError(f"regularizer has shape {L.shape}; pad it to ({state.N}, {state.N})")
    Wm = state.Wm
    if state.m == 0:
        return np.zeros((0, 0))
    LW = np.column_stack([L.matvec(Wm[:, i]) for i in range(state.m)])
    return Wm.T @ LW


class ProjectedRegularizer:
    """Incrementally maintained ``L_m`` (one new row and column per step)."""

    def __init__(self, L, N):
        self.L = as_operator(L)
        if self.L.shape != (N, N):
            raise ValueError(f"regularizer has shape {self.L.shape}; pad it to ({N}, {N})")
        self._LW = []
        self._Lm = np.zeros((0, 0))

    def update(self, state):
        W = state.Wm
        k = len(self._LW)
        m = state.m
        if m < k:
            raise ValueError("decomposition is smaller than the cached projection")
        Lm = np.zeros((m, m))
        Lm[:k, :k] = self._Lm
        for j in range(k, m):
            self._LW.append(np.asarray(self.L.matvec(W[:, j]), dtype=float).ravel())
        LW = np.column_stack(self._LW) if m else np.zeros((state.N, 0))
        if m > k:
            Lm[:, k:] = W.T @ LW[:, k:]
            Lm[k:, :k] = W[:, k:].T @ LW[:, :k]
        self._Lm = Lm
        return Lm.copy()


# -- decay diagnostics -------------------------------------------------------
@dataclass(frozen=True)
class DecayModel:
    """Singular values decaying like ``k exp(-alpha j)``."""

    alpha: float
    k: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.k > 0):
            raise ValueError(f"alpha and k must be positive, got {self.alpha}, {self.k}")

    @classmethod
    def fitted(cls, alpha, sigma1):
        """Model whose constant is ``sigma1 * exp(alpha)`` (so ``sigma_1 <= k e^{-alpha}``)."""
        return cls(alpha, sigma1 * math.exp(alpha))


def decay_product(state, m=None):
    """Geometric mean ``(prod_{i<=m} h_{i+1,i})^{1/m}``, evaluated in log space."""
    if m is None:
        m = state.m
    if m < 1:
        raise ValueError("decay_product needs m >= 1")
    if m > state.m:
        raise ValueError(f"only {state.m} subdiagonal entries are available")
    h = state.subdiag[:m]
    if np.any(h <= 0.0):
        return 0.0
    return float(np.exp(np.mean(np.log(h))))


def decay_bound(model, m):
    """``k exp(-m alpha / e^2 + (alpha + 2) / 2)``, the bound without its O(1/m) term."""
    if m < 1:
        raise ValueError("decay_bound needs m >= 1")
    a = model.alpha
    return model.k * math.exp(-m * a / math.e**2 + (a + 2.0) / 2.0)
