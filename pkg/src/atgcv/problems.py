"""Test problems, regularization matrices, noise and the 2-D blur operator.

The one-dimensional problems are discretizations of first-kind Fredholm
equations in the style of Hansen's Regularization Tools:

=========  ===============================  =====================  ==========================
name       kernel k(s, t)                   domain                 exact solution
=========  ===============================  =====================  ==========================
shaw       (cos s + cos t)^2 (sin u / u)^2  [-pi/2, pi/2]^2        2e^{-6(t-.8)^2}+e^{-2(t+.5)^2}
           u = pi (sin s + sin t)
wing       t exp(-s t^2)                    [0, 1]^2               indicator of (1/3, 2/3)
baart      exp(s cos t)                     [0, pi/2] x [0, pi]    sin t
foxgood    sqrt(s^2 + t^2)                  [0, 1]^2               t
i_laplace  exp(-s t)                        [0, inf)^2             exp(-t/2)
=========  ===============================  =====================  ==========================

All use midpoint collocation except ``i_laplace`` (Gauss-Laguerre). ``shaw``
and ``i_laplace`` take ``b = A x`` from the same quadrature; the others use
the closed-form right-hand side, so ``A x - b`` carries the discretization
error listed in :data:`DISCRETIZATION_RTOL`.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .operators import KroneckerProduct, KroneckerSum, as_operator

__all__ = [
    "PROBLEMS",
    "DISCRETIZATION_RTOL",
    "TestProblem",
    "BlurConfig",
    "make_problem",
    "deriv1",
    "add_noise",
    "blur_toeplitz",
    "blur_operator",
    "kron_regularizer",
    "phantom",
    "checkerboard",
]

PROBLEMS = ("shaw", "wing", "baart", "foxgood", "i_laplace")

# relative ||A x_true - b_exact|| allowed at N >= 32
DISCRETIZATION_RTOL = {
    "shaw": 1e-12,
    "wing": 1e-1,
    "baart": 1e-3,
    "foxgood": 1e-3,
    "i_laplace": 1e-12,
}

# exponents of exponential singular-value decay
ALPHA_HINTS = {"shaw": 2.0, "wing": 4.5}


@dataclass
class TestProblem:
    """A discretized problem with its exact data."""

    name: str
    N: int
    A: np.ndarray
    b_exact: np.ndarray
    x_true: np.ndarray
    alpha_hint: float = None
    meta: dict = field(default_factory=dict)

    __test__ = False  # not a pytest class

    @property
    def operator(self):
        return as_operator(self.A)


def _midpoints(a, b, n):
    h = (b - a) / n
    return a + (np.arange(n) + 0.5) * h, h


def _shaw(n):
    if n % 2:
        raise ValueError("shaw requires an even N")
    t, h = _midpoints(-math.pi / 2, math.pi / 2, n)
    s = t[:, None]
    u = math.pi * (np.sin(s) + np.sin(t[None, :]))
    sinc = np.sinc(u / math.pi)  # sin(u)/u with the removable singularity filled
    A = h * ((np.cos(s) + np.cos(t[None, :])) * sinc) ** 2
    A = 0.5 * (A + A.T)
    x = 2.0 * np.exp(-6.0 * (t - 0.8) ** 2) + np.exp(-2.0 * (t + 0.5) ** 2)
    return A, A @ x, x


def _wing(n, t1=1.0 / 3.0, t2=2.0 / 3.0):
    t, h = _midpoints(0.0, 1.0, n)
    s = t[:, None]
    A = h * t[None, :] * np.exp(-s * t[None, :] ** 2)
    x = ((t > t1) & (t < t2)).astype(float)
    b = 0.5 * (np.exp(-t * t1**2) - np.exp(-t * t2**2)) / t
    return A, b, x


def _baart(n):
    s, _ = _midpoints(0.0, math.pi / 2, n)
    t, ht = _midpoints(0.0, math.pi, n)
    A = ht * np.exp(s[:, None] * np.cos(t[None, :]))
    x = np.sin(t)
    b = 2.0 * np.sinh(s) / s
    return A, b, x


def _foxgood(n):
    t, h = _midpoints(0.0, 1.0, n)
    A = h * np.sqrt(t[:, None] ** 2 + t[None, :] ** 2)
    x = t.copy()
    b = ((1.0 + t**2) ** 1.5 - t**3) / 3.0
    return A, b, x


def _i_laplace(n):
    t, w = np.polynomial.laguerre.laggauss(n)
    # weights absorb the Laguerre factor exp(-t); collocate at the same nodes
    logw = np.log(w) + t
    A = np.exp(logw[None, :] - t[:, None] * t[None, :])
    x = np.exp(-t / 2.0)
    # the closed form 1/(s + 1/2) is poorly resolved by the quadrature for s < 1/2
    return A, A @ x, x


_GENERATORS = {
    "shaw": _shaw,
    "wing": _wing,
    "baart": _baart,
    "foxgood": _foxgood,
    "i_laplace": _i_laplace,
}


def make_problem(name, N):
    """Build one of :data:`PROBLEMS` at dimension ``N`` (``N >= 8``)."""
    key = name.lower()
    if key not in _GENERATORS:
        raise ValueError(f"unknown problem {name!r}; expected one of {PROBLEMS}")
    if int(N) != N or N < 8:
        raise ValueError(f"N must be an integer >= 8, got {N}")
    A, b, x = _GENERATORS[key](int(N))
    return TestProblem(name=key, N=int(N), A=A, b_exact=b, x_true=x, alpha_hint=ALPHA_HINTS.get(key))


def deriv1(N):
    """First-difference matrix with rows ``(1, -1)`` and a zero last row."""
    if N < 2:
        raise ValueError("deriv1 needs N >= 2")
    L = np.eye(N) - np.eye(N, k=1)
    L[-1, -1] = 0.0
    return L


def add_noise(b_exact, level, seed=None):
    """``b_exact + e`` with ``||e|| = level * ||b_exact||`` exactly.

    The direction of ``e`` is standard Gaussian, drawn from NumPy's PCG64
    generator seeded with ``seed`` (``numpy.random.default_rng``).
    """
    if level < 0:
        raise ValueError("noise level must be non-negative")
    b_exact = np.asarray(b_exact, dtype=float)
    if level == 0:
        return b_exact.copy()
    g = np.random.default_rng(seed).standard_normal(b_exact.shape)
    e = g * (level * np.linalg.norm(b_exact) / np.linalg.norm(g))
    return b_exact + e


# -- 2-D image restoration -----------------------------------------------------
@dataclass(frozen=True)
class BlurConfig:
    """Gaussian point-spread blur with Toeplitz blocks of half-bandwidth ``band``."""

    n: int
    band: int = 3
    sigma: float = 0.7

    def __post_init__(self):
        if self.n < 1 or not 1 <= self.band <= self.n:
            raise ValueError(f"need 1 <= band <= n, got band={self.band}, n={self.n}")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")


def blur_toeplitz(cfg):
    """Banded symmetric Toeplitz factor ``T`` with ``A = kron(T, T)``.

    ``T_ij = exp(-(i-j)^2 / (2 sigma^2)) / (sigma sqrt(2 pi))`` for
    ``|i - j| < band``; zero otherwise (zero boundary conditions).
    """
    k = np.arange(cfg.n)
    d = np.abs(k[:, None] - k[None, :])
    z = 1.0 / (cfg.sigma * math.sqrt(2.0 * math.pi))
    return np.where(d < cfg.band, z * np.exp(-(d**2) / (2.0 * cfg.sigma**2)), 0.0)


def blur_operator(cfg):
    """Matrix-free blur ``kron(T, T)`` on column-stacked ``n x n`` images."""
    T = blur_toeplitz(cfg)
    return KroneckerProduct(T, T)


def kron_regularizer(n):
    """``kron(I, L1) + kron(L1, I)`` with ``L1 = deriv1(n)``, matrix-free."""
    if n < 2:
        raise ValueError("kron_regularizer needs n >= 2")
    return KroneckerSum(deriv1(n))


def phantom(n):
    """Piecewise-constant head-like test image with values in ``[0, 1]``."""
    y, x = np.mgrid[-1:1:complex(0, n), -1:1:complex(0, n)]
    img = np.zeros((n, n))
    # (value, x0, y0, a, b, angle in degrees)
    ellipses = [
        (1.0, 0.0, 0.0, 0.69, 0.92, 0),
        (-0.8, 0.0, -0.0184, 0.6624, 0.874, 0),
        (-0.2, 0.22, 0.0, 0.11, 0.31, -18),
        (-0.2, -0.22, 0.0, 0.16, 0.41, 18),
        (0.1, 0.0, 0.35, 0.21, 0.25, 0),
        (0.1, 0.0, 0.1, 0.046, 0.046, 0),
        (0.1, -0.08, -0.605, 0.046, 0.023, 0),
        (0.1, 0.06, -0.605, 0.023, 0.046, 0),
    ]
    for val, x0, y0, a, b, ang in ellipses:
        th = math.radians(ang)
        xr = (x - x0) * math.cos(th) + (y - y0) * math.sin(th)
        yr = -(x - x0) * math.sin(th) + (y - y0) * math.cos(th)
        img[(xr / a) ** 2 + (yr / b) ** 2 <= 1.0] += val
    return np.clip(img, 0.0, 1.0)


def checkerboard(n, tiles=4):
    """``n x n`` checkerboard with ``tiles`` squares per side, values 0.2 / 0.8."""
    k = np.arange(n) * tiles // n
    return np.where((k[:, None] + k[None, :]) % 2 == 0, 0.8, 0.2)
