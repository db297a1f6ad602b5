"""Approximate (generalized) singular triplets lifted from the Arnoldi projection.

The SVD of ``Hbar_m`` (or the GSVD of ``(Hbar_m, L_m)``) is mapped back to
``R^N`` through the Krylov basis. The residual checks and a-posteriori
estimates below measure how well the lifted triplets approximate those of
``A`` (and ``(A, L)``).
"""

from dataclasses import dataclass

import numpy as np

from .arnoldi import ArnoldiBreakdownError, project_regularizer
from .dense import gsvd, spectral_norm, svd
from .operators import as_operator, to_dense

__all__ = [
    "SPURIOUS_RTOL",
    "ApproxSvdTriplet",
    "ApproxGsvdTriplet",
    "approx_svd",
    "approx_gsvd",
    "galerkin_residual",
    "transpose_residual",
    "aposteriori_bound",
    "gsvd_galerkin_residual",
    "gsvd_projection_residual",
    "svd_approx_error",
    "krylov_projection_error",
    "transpose_projection_bound",
]

SPURIOUS_RTOL = 1e-12


@dataclass
class ApproxSvdTriplet:
    """``Ubar = W U``, ``sigma``, ``Vbar = W_m V`` from the SVD of the projection.

    For the rectangular projection ``Ubar`` has ``m + 1`` columns (the last one
    pairs with the zero row of ``Sigma``); for the square one it has ``m``.
    """

    Ubar: np.ndarray
    sigma: np.ndarray
    Vbar: np.ndarray
    spurious: np.ndarray

    def below_noise(self, noise_level, beta):
        """Mask of values under ``noise_level * ||b||``; continuing past them is pointless."""
        return self.sigma < noise_level * beta

    def noise_stop(self, noise_level, beta):
        return bool(np.any(self.below_noise(noise_level, beta)))


@dataclass
class ApproxGsvdTriplet:
    """Lifted GSVD of ``(Hbar_m, L_m)``; ordering follows :func:`atgcv.dense.gsvd`."""

    Ubar: np.ndarray
    Vbar: np.ndarray
    Xbar: np.ndarray
    s: np.ndarray
    c: np.ndarray
    gamma: np.ndarray
    spurious: np.ndarray

    @property
    def finite_gamma(self):
        return self.gamma[np.isfinite(self.gamma)]


def _spurious(values):
    top = np.max(values[np.isfinite(values)], initial=0.0)
    return values < SPURIOUS_RTOL * top


def approx_svd(state, square=False):
    """Approximate singular triplets of ``A`` from ``Hbar_m`` (or ``H_m``)."""
    if state.m < 1:
        raise ValueError("approx_svd needs m >= 1")
    if square:
        f = svd(state.H)
        Ubar = state.Wm @ f.U
    else:
        f = svd(state.Hbar, full_matrices=True)
        Ubar = state.W @ f.U
    Vbar = state.Wm @ f.V
    s = f.singular_values
    return ApproxSvdTriplet(Ubar=Ubar, sigma=s, Vbar=Vbar, spurious=_spurious(s))


def _check_k(state, k):
    if not 1 <= k <= state.m:
        raise IndexError(f"k = {k} outside 1..{state.m}")


def galerkin_residual(state, A=None, k=1, triplet=None):
    """Residual pair ``(||A v_k - s_k u_k||, ||W_m^T (A^T u_k - s_k v_k)||)``.

    Both vanish up to rounding for the rectangular projection.
    """
    _check_k(state, k)
    A = as_operator(state.A if A is None else A)
    t = approx_svd(state) if triplet is None else triplet
    u, v, s = t.Ubar[:, k - 1], t.Vbar[:, k - 1], t.sigma[k - 1]
    r1 = np.linalg.norm(A.matvec(v) - s * u)
    r2 = np.linalg.norm(state.Wm.T @ (A.rmatvec(u) - s * v))
    return float(r1), float(r2)


def transpose_residual(state, A=None, k=1, triplet=None):
    """Full transpose residual ``||A^T u_k - s_k v_k||``."""
    _check_k(state, k)
    A = as_operator(state.A if A is None else A)
    t = approx_svd(state) if triplet is None else triplet
    u, v, s = t.Ubar[:, k - 1], t.Vbar[:, k - 1], t.sigma[k - 1]
    return float(np.linalg.norm(A.rmatvec(u) - s * v))


def aposteriori_bound(state, A=None):
    """Single-column estimate ``||W_{m+1}^T A w_{m+1}||`` of the transpose residual bound."""
    if state.breakdown:
        raise ArnoldiBreakdownError("no genuine w_{m+1} after breakdown")
    A = as_operator(state.A if A is None else A)
    w = state.W[:, -1]
    return float(np.linalg.norm(state.W.T @ A.matvec(w)))


def approx_gsvd(state, Lm):
    """Lift the GSVD of ``(Hbar_m, L_m)`` through the Krylov basis."""
    if state.m < 1:
        raise ValueError("approx_gsvd needs m >= 1")
    p = gsvd(state.Hbar, Lm)
    return ApproxGsvdTriplet(
        Ubar=state.W @ p.U,
        Vbar=state.Wm @ p.V[: state.m],
        Xbar=state.Wm @ p.X,
        s=p.s,
        c=p.c,
        gamma=p.gamma,
        spurious=_spurious(p.gamma),
    )


def gsvd_galerkin_residual(state, L, k, A=None, triplet=None, Lm=None):
    """Residual pair ``(||A x_k - s_k u_k||, ||W_m^T (L x_k - c_k v_k)||)``.

    Both vanish up to rounding, scaled by ``||x_k||``.
    """
    _check_k(state, k)
    A = as_operator(state.A if A is None else A)
    L = as_operator(L)
    if triplet is None:
        triplet = approx_gsvd(state, project_regularizer(L, state) if Lm is None else Lm)
    x = triplet.Xbar[:, k - 1]
    g1 = np.linalg.norm(A.matvec(x) - triplet.s[k - 1] * triplet.Ubar[:, k - 1])
    g2 = np.linalg.norm(state.Wm.T @ (L.matvec(x) - triplet.c[k - 1] * triplet.Vbar[:, k - 1]))
    return float(g1), float(g2)


def gsvd_projection_residual(state, L, k, triplet=None, Lm=None):
    """``||L x_k - c_k v_k||`` together with the bound it must respect.

    The bound is ``||(I - W W^T) L W W^T|| * ||x_k||``; the columns of ``Xbar``
    are not normalized, hence the extra factor.
    """
    _check_k(state, k)
    Ld = to_dense(L)
    Wm = state.Wm
    if triplet is None:
        triplet = approx_gsvd(state, Wm.T @ Ld @ Wm if Lm is None else Lm)
    x, v, c = triplet.Xbar[:, k - 1], triplet.Vbar[:, k - 1], triplet.c[k - 1]
    res = float(np.linalg.norm(Ld @ x - c * v))
    LW = Ld @ Wm
    P = LW - Wm @ (Wm.T @ LW)
    bound = spectral_norm(P) * float(np.linalg.norm(x)) if np.any(P) else 0.0
    return res, bound


# -- dense diagnostics ---------------------------------------------------------
def svd_approx_error(state, A=None, triplet=None):
    """``||A - Ubar Sigma Vbar^T||`` for the rectangular projection (dense ``A``)."""
    A = to_dense(state.A if A is None else A)
    t = approx_svd(state) if triplet is None else triplet
    approx = (t.Ubar[:, : state.m] * t.sigma) @ t.Vbar.T
    return spectral_norm(A - approx)


def krylov_projection_error(state, A=None):
    """``||A (I - W_m W_m^T)||`` (dense ``A``)."""
    A = to_dense(state.A if A is None else A)
    Wm = state.Wm
    return spectral_norm(A - (A @ Wm) @ Wm.T)


def transpose_projection_bound(state, A=None):
    """``||(I - W_m W_m^T) A^T W_m W_m^T||`` (dense ``A``)."""
    A = to_dense(state.A if A is None else A)
    Wm = state.Wm
    AtW = A.T @ Wm
    return spectral_norm(AtW - Wm @ (Wm.T @ AtW))
