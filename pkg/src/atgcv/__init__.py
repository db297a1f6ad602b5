"""Arnoldi-Tikhonov regularization with a projected GCV parameter rule."""

from .arnoldi import (
    ArnoldiBreakdownError,
    ArnoldiDecomposition,
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
from .dense import (
    ConvergenceError,
    DimensionError,
    GsvdPair,
    RankDeficientError,
    SvdFactors,
    gsvd,
    matvec,
    qr_lstsq,
    spectral_norm,
    svd,
)
from .driver import (
    NumericalFailure,
    RunConfig,
    RunReport,
    at_gcv,
    deblur_config,
    deblur_image,
    run_experiment,
)
from .gcv import (
    GcvCurve,
    ProjectedGcv,
    full_gcv_lambda,
    gcv_full,
    gcv_projected,
    minimize_gcv,
    optimal_lambda,
)
from .problems import (
    BlurConfig,
    TestProblem,
    add_noise,
    blur_operator,
    checkerboard,
    deriv1,
    kron_regularizer,
    make_problem,
    phantom,
)
from .spectral import (
    aposteriori_bound,
    approx_gsvd,
    approx_svd,
    galerkin_residual,
    gsvd_projection_residual,
)
from .tikhonov import ReducedSolution, full_tikhonov, lift, solve_reduced

__version__ = "0.1.0"
