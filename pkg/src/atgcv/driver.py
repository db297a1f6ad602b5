"""The AT-GCV iteration and the experiment drivers built on it."""

import csv
import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import spectral
from .arnoldi import (
    ArnoldiBreakdownError,
    DecayModel,
    ProjectedRegularizer,
    arnoldi,
    arnoldi_start,
    decay_bound,
    decay_product,
)
from .dense import RankDeficientError, gsvd
from .gcv import GRID_SIZE, ProjectedGcv, full_gcv_lambda, minimize_gcv, optimal_lambda
from .operators import as_operator
from .pgm import read_pgm, write_pgm
from .problems import BlurConfig, add_noise, blur_operator, deriv1, kron_regularizer, make_problem
from .tikhonov import lift, solve_reduced

__all__ = [
    "DEBLUR_DELTA",
    "RUN_COLUMNS",
    "TERMINATIONS",
    "NumericalFailure",
    "RunConfig",
    "IterationRecord",
    "RunReport",
    "at_gcv",
    "run_experiment",
    "deblur_config",
    "deblur_image",
    "deblur",
    "diagnose",
    "dump_problem",
    "write_csv",
]

# image runs: stop once an iteration improves the residual by under 10%
DEBLUR_DELTA = 1e-1

RUN_COLUMNS = ("m", "lambda_m", "gcv_min", "residual_norm", "rel_error", "wall_time_s")
TERMINATIONS = ("residual-rule", "gcv-rule", "breakdown", "max_m")


class NumericalFailure(RuntimeError):
    """A numerical step of the iteration failed; ``iteration`` says where."""

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


@dataclass
class RunConfig:
    """Settings for one AT-GCV run.

    ``problem``/``n``/``noise``/``seed`` describe the data for
    :func:`run_experiment`; the rest steer :func:`at_gcv`. ``stop_rule`` is
    ``"residual"`` (relative change of ``||r_m||`` below ``delta``) or
    ``"gcv"`` (relative change of the GCV minimum below ``delta``).
    """

    problem: str = "shaw"
    n: int = 120
    noise: float = 1e-2
    seed: int = 0
    delta: float = 1e-4
    max_m: int = 50
    regularizer: str = "deriv1"
    variant: str = "mgs"
    stop_rule: str = "residual"
    grid_size: int = GRID_SIZE
    grid_bounds: tuple = None
    timing: bool = False

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if self.max_m < 1:
            raise ValueError("max_m must be at least 1")
        if self.regularizer not in ("identity", "deriv1", "kron2d"):
            raise ValueError(f"unknown regularizer {self.regularizer!r}")
        if self.stop_rule not in ("residual", "gcv"):
            raise ValueError(f"unknown stop rule {self.stop_rule!r}")
        if self.noise < 0:
            raise ValueError("noise level must be non-negative")


@dataclass
class IterationRecord:
    m: int
    lambda_m: float
    gcv_min_value: float
    residual_norm: float
    relative_error: float = math.nan
    wall_time: float = 0.0


@dataclass
class RunReport:
    records: list
    final_x: np.ndarray
    terminated_by: str
    lambda_full_gcv: float = None
    lambda_opt: float = None
    extras: dict = field(default_factory=dict)

    @property
    def m(self):
        return self.records[-1].m

    @property
    def lambdas(self):
        return np.array([r.lambda_m for r in self.records])

    @property
    def lambda_final(self):
        return self.records[-1].lambda_m

    @property
    def relative_error(self):
        return self.records[-1].relative_error


def _relchange(new, old):
    if new == 0.0:
        return 0.0 if old == 0.0 else math.inf
    return abs(new - old) / new


def at_gcv(A, b, L, cfg=None, x_true=None):
    """Arnoldi-Tikhonov iteration with the projected GCV parameter rule.

    Each step extends the Arnoldi decomposition, projects ``L``, minimizes
    ``G_m`` for ``lambda_m``, and solves the reduced problem. The loop stops
    when the relative change of the reduced residual norm drops below
    ``cfg.delta`` (checked from ``m = 2`` on), at breakdown, or at
    ``cfg.max_m``; the last reduced solution is then lifted to ``R^N``.

    Parameters
    ----------
    A : array_like or LinearOperator
    b : (N,) array_like
    L : array_like or LinearOperator
        Square ``N x N`` regularization operator (pad rectangular ones).
    cfg : RunConfig, optional
    x_true : (N,) array_like, optional
        Enables the per-iteration relative error.
    """
    cfg = RunConfig() if cfg is None else cfg
    A = as_operator(A)
    N = A.shape[0]
    b = np.asarray(b, dtype=float)
    state = arnoldi_start(A, b, variant=cfg.variant)
    proj = ProjectedRegularizer(L, N)
    xt_norm = None
    if x_true is not None:
        x_true = np.asarray(x_true, dtype=float)
        xt_norm = float(np.linalg.norm(x_true))

    records = []
    y = None
    terminated = None
    while terminated is None:
        t0 = time.perf_counter()
        state.extend()
        m = state.m
        Lm = proj.update(state)
        try:
            G = ProjectedGcv(state.Hbar, Lm, state.beta, N)
        except RankDeficientError as exc:
            raise NumericalFailure(f"GSVD of the projected pair failed at m = {m}: {exc}", m) from exc
        gmax, gmin = G.gamma_range()
        try:
            lam, _ = minimize_gcv(G, gmax, gmin, num=cfg.grid_size, bounds=cfg.grid_bounds)
        except (ValueError, np.linalg.LinAlgError) as exc:
            raise NumericalFailure(f"GCV minimization failed at m = {m}: {exc}", m) from exc
        sol = solve_reduced(state.Hbar, Lm, state.beta, lam)
        y = sol.y
        rel_err = math.nan
        if xt_norm:
            rel_err = float(np.linalg.norm(lift(state, y) - x_true) / xt_norm)
        records.append(
            IterationRecord(
                m=m,
                lambda_m=float(lam),
                gcv_min_value=G(lam),
                residual_norm=sol.residual_norm,
                relative_error=rel_err,
                wall_time=time.perf_counter() - t0,
            )
        )
        if state.breakdown:
            terminated = "breakdown"
        elif m >= 2 and cfg.stop_rule == "residual":
            if _relchange(records[-1].residual_norm, records[-2].residual_norm) < cfg.delta:
                terminated = "residual-rule"
        elif m >= 2 and cfg.stop_rule == "gcv":
            if _relchange(records[-1].gcv_min_value, records[-2].gcv_min_value) < cfg.delta:
                terminated = "gcv-rule"
        if terminated is None and m >= cfg.max_m:
            terminated = "max_m"

    x = lift(state, y)
    return RunReport(records=records, final_x=x, terminated_by=terminated, extras={"state": state})


# -- CSV output ----------------------------------------------------------------
def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    if v is None:
        return "nan"
    return "%.16e" % float(v)


def write_csv(path, header, rows):
    """Comma-separated, header row, 17 significant digits, LF line endings."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _run_rows(report, timing):
    for r in report.records:
        yield (
            r.m,
            r.lambda_m,
            r.gcv_min_value,
            r.residual_norm,
            r.relative_error,
            r.wall_time if timing else math.nan,
        )


def _regularizer(name, N):
    if name == "identity":
        return np.eye(N)
    if name == "deriv1":
        return deriv1(N)
    raise ValueError(f"regularizer {name!r} does not apply to 1-D problems")


def run_experiment(cfg, out_dir=None, oracles=True):
    """Run AT-GCV on a generated test problem.

    For problems small enough to factor densely (``N <= 256``) the report also
    carries the full-GCV minimizer ``lambda_full_gcv`` and the error-optimal
    ``lambda_opt``. With ``out_dir`` the iteration history is written to
    ``run.csv`` and scalar results to ``summary.csv``.
    """
    prob = make_problem(cfg.problem, cfg.n)
    N = prob.N
    b = add_noise(prob.b_exact, cfg.noise, cfg.seed)
    L = _regularizer(cfg.regularizer, N)
    report = at_gcv(prob.A, b, L, cfg, x_true=prob.x_true)
    if oracles and N <= 256:
        report.lambda_full_gcv = full_gcv_lambda(prob.A, L, b)[0]
        report.lambda_opt = optimal_lambda(prob.A, L, b, prob.x_true)
    report.extras.update(problem=prob, b=b, L=L)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_csv(os.path.join(out_dir, "run.csv"), RUN_COLUMNS, _run_rows(report, cfg.timing))
        summary = [
            ("problem", prob.name),
            ("n", N),
            ("noise", cfg.noise),
            ("seed", cfg.seed),
            ("terminated_by", report.terminated_by),
            ("m_final", report.m),
            ("lambda_final", report.lambda_final),
            ("lambda_full_gcv", report.lambda_full_gcv),
            ("lambda_opt", report.lambda_opt),
            ("rel_error_final", report.relative_error),
        ]
        write_csv(os.path.join(out_dir, "summary.csv"), ("key", "value"), summary)
    return report


# -- image restoration ---------------------------------------------------------
def deblur_config(**kwargs):
    """:class:`RunConfig` with the image defaults (``kron2d``, ``DEBLUR_DELTA``)."""
    kwargs.setdefault("regularizer", "kron2d")
    kwargs.setdefault("delta", DEBLUR_DELTA)
    return RunConfig(**kwargs)


def deblur_image(image, blur, cfg=None, corrupt=True):
    """Restore a square image with AT-GCV and ``L = I (x) L1 + L1 (x) I``.

    With ``corrupt=True`` the image is the clean original: it is blurred with
    ``blur`` and perturbed by ``cfg.noise`` relative Gaussian noise (seed
    ``cfg.seed``) first. Otherwise it is taken as the observed data.

    Returns ``(report, observed, restored)`` as ``n x n`` arrays.
    """
    cfg = deblur_config() if cfg is None else cfg
    image = np.asarray(image, dtype=float)
    n = image.shape[0]
    if image.ndim != 2 or image.shape != (n, n):
        raise ValueError(f"image must be square, got shape {image.shape}")
    if blur.n != n:
        blur = BlurConfig(n=n, band=blur.band, sigma=blur.sigma)
    A = blur_operator(blur)
    if corrupt:
        x_true = np.ravel(image, order="F")
        b = add_noise(A.matvec(x_true), cfg.noise, cfg.seed)
    else:
        x_true = None
        b = np.ravel(image, order="F")
    report = at_gcv(A, b, kron_regularizer(n), cfg, x_true=x_true)
    observed = np.reshape(b, (n, n), order="F")
    restored = np.reshape(report.final_x, (n, n), order="F")
    if x_true is not None:
        report.extras["observed_rel_error"] = float(np.linalg.norm(b - x_true) / np.linalg.norm(x_true))
    return report, observed, restored


def deblur(image_in, out_dir, band=7, sigma=2.0, cfg=None, corrupt=True):
    """File-level wrapper of :func:`deblur_image`.

    Writes ``restored.pgm``, ``observed.pgm`` and ``run.csv`` into ``out_dir``.
    """
    cfg = deblur_config() if cfg is None else cfg
    image = read_pgm(image_in)
    if image.shape[0] != image.shape[1]:
        raise ValueError(f"image must be square, got {image.shape[1]} x {image.shape[0]}")
    blur = BlurConfig(n=image.shape[0], band=band, sigma=sigma)
    report, observed, restored = deblur_image(image, blur, cfg, corrupt=corrupt)
    os.makedirs(out_dir, exist_ok=True)
    write_pgm(os.path.join(out_dir, "restored.pgm"), restored)
    write_pgm(os.path.join(out_dir, "observed.pgm"), observed)
    write_csv(os.path.join(out_dir, "run.csv"), RUN_COLUMNS, _run_rows(report, cfg.timing))
    return report


# -- diagnostics -----------------------------------------------------------------
def _fit_alpha(sigma):
    j = np.arange(1, sigma.size + 1)
    sel = (j >= 3) & (sigma > 1e-12 * sigma[0])
    return float(-np.polyfit(j[sel], np.log(sigma[sel]), 1)[0])


def diagnose(problem, N, max_m, out_dir=None, variant="householder"):
    """Convergence and spectral-approximation diagnostics on exact data.

    Produces four tables (returned as a dict and, with ``out_dir``, written
    as CSV files of the same names):

    ``decay``      m, decay_product, decay_bound
    ``subdiag``    m, h_next, sigma_m, h_bound (= 10 sqrt(m) sigma_m)
    ``svd_approx`` m, svd_residual, projection_residual, aposteriori_bound
    ``spectrum``   m, k, sigma_approx, sigma_true, gamma_approx, gamma_true
                   (k = 1 is the largest value, ``inf`` included; L = deriv1)
    """
    prob = make_problem(problem, N)
    A = prob.A
    sigma = np.linalg.svd(A, compute_uv=False)
    alpha = prob.alpha_hint if prob.alpha_hint is not None else _fit_alpha(sigma)
    model = DecayModel.fitted(alpha, sigma[0])
    L = deriv1(N)
    # inf (null directions of L) sorts first, so ranks pair up with the
    # projected values that approximate it
    gamma_true = np.sort(gsvd(A, L).gamma)[::-1]

    state = arnoldi(A, prob.b_exact, max_m, variant=variant)
    tables = {"decay": [], "subdiag": [], "svd_approx": [], "spectrum": []}
    for m in range(1, state.m + 1):
        sub = state.truncated(m)
        tables["decay"].append((m, decay_product(sub), decay_bound(model, m)))
        tables["subdiag"].append((m, sub.h_next, sigma[m - 1], 10.0 * math.sqrt(m) * sigma[m - 1]))
        try:
            apost = spectral.aposteriori_bound(sub, A)
        except ArnoldiBreakdownError:
            apost = math.nan
        tables["svd_approx"].append(
            (m, spectral.svd_approx_error(sub, A), spectral.krylov_projection_error(sub, A), apost)
        )
        tsvd = spectral.approx_svd(sub)
        Lm = sub.Wm.T @ L @ sub.Wm
        try:
            g = np.sort(spectral.approx_gsvd(sub, Lm).gamma)[::-1]
        except RankDeficientError:
            g = np.array([])
        for k in range(1, m + 1):
            tables["spectrum"].append(
                (
                    m,
                    k,
                    tsvd.sigma[k - 1],
                    sigma[k - 1],
                    g[k - 1] if k <= g.size else math.nan,
                    gamma_true[k - 1] if k <= gamma_true.size else math.nan,
                )
            )
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        headers = {
            "decay": ("m", "decay_product", "decay_bound"),
            "subdiag": ("m", "h_next", "sigma_m", "h_bound"),
            "svd_approx": ("m", "svd_residual", "projection_residual", "aposteriori_bound"),
            "spectrum": ("m", "k", "sigma_approx", "sigma_true", "gamma_approx", "gamma_true"),
        }
        for name, rows in tables.items():
            write_csv(os.path.join(out_dir, f"{name}.csv"), headers[name], rows)
    return tables


def dump_problem(name, N, out_dir):
    """Write ``A.csv``, ``b.csv`` and ``x_true.csv`` for external checking."""
    prob = make_problem(name, N)
    os.makedirs(out_dir, exist_ok=True)
    write_csv(os.path.join(out_dir, "A.csv"), [f"a{j + 1}" for j in range(N)], prob.A)
    write_csv(os.path.join(out_dir, "b.csv"), ("b",), prob.b_exact[:, None])
    write_csv(os.path.join(out_dir, "x_true.csv"), ("x_true",), prob.x_true[:, None])
    return prob
