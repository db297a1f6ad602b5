"""Generalized cross-validation: full and projected GCV functions and their minimization."""

import math
from dataclasses import dataclass

import numpy as np

from .dense import DimensionError, RankDeficientError, gsvd
from .tikhonov import full_tikhonov, solve_reduced

__all__ = [
    "GRID_SIZE",
    "REFINE_RTOL",
    "GcvCurve",
    "spectrum_range",
    "lambda_grid",
    "golden_section",
    "minimize_gcv",
    "gcv_full",
    "gcv_projected",
    "ProjectedGcv",
    "full_gcv_lambda",
    "optimal_lambda",
]

GRID_SIZE = 200
REFINE_RTOL = 1e-4
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
# generalized values with c below this are left out of the grid range
_RANGE_CTOL = math.sqrt(np.finfo(float).eps)


@dataclass
class GcvCurve:
    """Sampled GCV values on an ascending log-spaced grid."""

    lambdas: np.ndarray
    values: np.ndarray
    argmin_index: int

    @property
    def grid_minimizer(self):
        return float(self.lambdas[self.argmin_index])


def _filter(gamma, lam):
    # lam^2 / (gamma^2 + lam^2), zero for infinite gamma
    g = np.asarray(gamma, dtype=float)
    out = np.zeros_like(g)
    fin = np.isfinite(g)
    out[fin] = lam**2 / (g[fin] ** 2 + lam**2)
    return out


def spectrum_range(pair):
    """``(gamma_max, gamma_min)`` used to place the lambda grid.

    Values with ``c < sqrt(eps)`` belong to numerical null directions of the
    regularizer; their filter factors vanish on any sensible grid, but their
    huge ``gamma`` would push the grid floor ``1e-10 gamma_max`` out of range.
    Returns ``None`` when nothing qualifies.
    """
    keep = np.isfinite(pair.gamma) & (pair.gamma > 0) & (pair.c >= _RANGE_CTOL)
    if not np.any(keep):
        return None
    g = pair.gamma[keep]
    return float(g.max()), float(g.min())


def lambda_grid(gamma_max, gamma_min, num=GRID_SIZE, bounds=None):
    """Log-spaced grid over the generalized spectrum, widened two decades each way.

    ``bounds=(lo, hi)`` replaces the spectrum-derived range.
    """
    if bounds is not None:
        lo, hi = bounds
    else:
        if not gamma_max > 0 or not math.isfinite(gamma_max):
            raise ValueError(f"gamma_max must be positive and finite, got {gamma_max}")
        lo = max(gamma_min, 1e-10 * gamma_max) / 100.0
        hi = gamma_max * 100.0
    if not 0 < lo < hi:
        raise ValueError(f"invalid lambda range [{lo}, {hi}]")
    return np.logspace(math.log10(lo), math.log10(hi), num)


def golden_section(f, a, b, tol):
    """Golden-section search for a minimum of ``f`` on ``[a, b]``.

    Returns ``(x, f(x))`` for the best point evaluated once the bracket is
    narrower than ``tol``.
    """
    a, b = min(a, b), max(a, b)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def _minimize_on_grid(func, lambdas, rtol, strict):
    values = np.array([func(lam) for lam in lambdas], dtype=float)
    finite = np.isfinite(values)
    if strict and not np.all(finite):
        bad = lambdas[~finite][0]
        raise ValueError(f"objective is not finite at lambda = {bad:.6e}")
    if not np.any(finite):
        raise ValueError("objective is not finite anywhere on the grid")
    masked = np.where(finite, values, np.inf)
    i = int(np.argmin(masked))  # first index among ties
    lo = lambdas[max(i - 1, 0)]
    hi = lambdas[min(i + 1, lambdas.size - 1)]

    def in_log(t):
        v = func(math.exp(t))
        return v if math.isfinite(v) else math.inf

    t_star, v_star = golden_section(in_log, math.log(lo), math.log(hi), math.log1p(rtol))
    lam_star = math.exp(t_star) if v_star < masked[i] else float(lambdas[i])
    return lam_star, GcvCurve(lambdas=np.asarray(lambdas), values=values, argmin_index=i)


def minimize_gcv(evaluator, gamma_max, gamma_min, num=GRID_SIZE, rtol=REFINE_RTOL, bounds=None):
    """Coarse log-grid scan followed by golden-section refinement in ``log lambda``.

    Ties on the grid resolve to the smallest ``lambda``; the refined point is
    only accepted when it strictly improves on the grid minimum.

    Returns
    -------
    lam_star : float
    curve : GcvCurve
    """
    lambdas = lambda_grid(gamma_max, gamma_min, num=num, bounds=bounds)
    return _minimize_on_grid(evaluator, lambdas, rtol, strict=True)


def gcv_full(pair, Utb, lam, N=None, P=None):
    """GCV function of the full problem expressed through the GSVD of ``(A, L)``.

    Parameters
    ----------
    pair : GsvdPair
        GSVD of ``(A, L)``; ``gamma`` may contain ``inf`` where ``L`` has no
        generalized value (those terms are unregularized: zero filter factor).
    Utb : (M,) ndarray
        ``U^T b`` with the full orthogonal ``U``.
    lam : float
    N, P : int, optional
        Column count and number of finite generalized values; checked
        against ``pair`` when given.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    gamma = pair.gamma
    n = gamma.size
    if N is not None and N != n:
        raise DimensionError(f"pair has {n} columns, N = {N}")
    if P is not None and P != int(np.count_nonzero(np.isfinite(gamma))):
        raise DimensionError("P does not match the number of finite generalized singular values")
    Utb = np.asarray(Utb, dtype=float)
    M = Utb.size
    f = _filter(gamma, lam)
    num = np.sum((f * Utb[:n]) ** 2) + np.sum(Utb[n:] ** 2)
    den = (M - n) + np.sum(f)
    return float(num / den**2)


class ProjectedGcv:
    """``G_m(lambda)`` for a fixed projected pair; the GSVD is computed once.

    The numerator is the actual reduced residual ``||Hbar y - beta e_1||^2``;
    unapproximated generalized singular values count as zero, giving the
    ``N - m`` term of the denominator.
    """

    def __init__(self, Hbar, Lm, beta, N, pair=None):
        self.Hbar = np.asarray(Hbar, dtype=float)
        self.Lm = np.asarray(Lm, dtype=float)
        self.beta = float(beta)
        self.N = int(N)
        self.m = self.Hbar.shape[1]
        if self.m > self.N:
            raise DimensionError(f"projection dimension m = {self.m} exceeds N = {self.N}")
        self.pair = gsvd(self.Hbar, self.Lm) if pair is None else pair
        self.gamma = self.pair.gamma

    def gamma_range(self):
        rng = spectrum_range(self.pair)
        if rng is None:
            s = np.linalg.svd(self.Hbar, compute_uv=False)
            s = s[s > 0]
            rng = float(s.max()), float(s.min())
        return rng

    def residual_norm(self, lam):
        return solve_reduced(self.Hbar, self.Lm, self.beta, lam).residual_norm

    def __call__(self, lam):
        if lam <= 0:
            raise ValueError("lambda must be positive")
        r = self.residual_norm(lam)
        den = self.N - self.m + np.sum(_filter(self.gamma, lam))
        return float(r**2 / den**2)


def gcv_projected(Hbar, Lm, beta, lam, N, pair=None):
    """Projected GCV function ``G_m(lambda)``."""
    return ProjectedGcv(Hbar, Lm, beta, N, pair=pair)(lam)


def full_gcv_lambda(A, L, b, num=GRID_SIZE, rtol=REFINE_RTOL, pair=None):
    """Minimizer of the full GCV function (dense ``A`` and square ``L``).

    Returns ``(lam, curve)``.
    """
    A = np.asarray(A, dtype=float)
    pair = gsvd(A, L) if pair is None else pair
    Utb = pair.U.T @ np.asarray(b, dtype=float)
    gmax, gmin = spectrum_range(pair)
    return minimize_gcv(lambda lam: gcv_full(pair, Utb, lam), gmax, gmin, num=num, rtol=rtol)


def optimal_lambda(A, L, b, x_true, num=GRID_SIZE, rtol=REFINE_RTOL, bounds=None, return_curve=False):
    """``lambda`` minimizing ``||x_lambda - x_true||`` over the standard grid.

    The grid comes from the generalized spectrum of ``(A, L)`` unless
    ``bounds`` is given; values where the normal matrix is numerically
    singular are skipped.
    """
    A = np.asarray(A, dtype=float)
    L = np.asarray(L, dtype=float)
    x_true = np.asarray(x_true, dtype=float)
    if bounds is None:
        gmax, gmin = spectrum_range(gsvd(A, L))
        lambdas = lambda_grid(gmax, gmin, num=num)
    else:
        lambdas = lambda_grid(None, None, num=num, bounds=bounds)

    def err(lam):
        try:
            return float(np.linalg.norm(full_tikhonov(A, L, b, lam) - x_true))
        except RankDeficientError:
            return math.inf

    lam, curve = _minimize_on_grid(err, lambdas, rtol, strict=False)
    return (lam, curve) if return_curve else lam
