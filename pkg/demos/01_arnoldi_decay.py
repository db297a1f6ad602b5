"""
Arnoldi on discrete ill-posed problems
======================================

The Arnoldi process builds ``A W_m = W_{m+1} Hbar_m`` without ever touching
``A^T``. For severely ill-posed problems the subdiagonal entries
``h_{m+1,m}`` decay about as fast as the singular values, so a handful of
steps already captures the dominant part of ``A``.
"""

import math

import numpy as np

from atgcv.arnoldi import DecayModel, arnoldi, decay_bound, decay_product
from atgcv.problems import make_problem
from atgcv.spectral import krylov_projection_error

# %%
# Exact data, N = 32, Householder orthogonalization.
for name, alpha in [("shaw", 2.0), ("wing", 4.5)]:
    p = make_problem(name, 32)
    sigma = np.linalg.svd(p.A, compute_uv=False)
    model = DecayModel.fitted(alpha, sigma[0])
    s = arnoldi(p.A, p.b_exact, 10, variant="householder")
    print(f"\n{name}: breakdown at m = {s.m}" if s.breakdown else f"\n{name}: {s.m} steps")
    print("  m   h_{m+1,m}    sigma_m    prod h     bound     ||A(I - W W^T)||")
    for m in range(1, s.m + 1):
        sub = s.truncated(m)
        prod = decay_product(sub) if m >= 2 else math.nan
        print(
            f"{m:3d}  {sub.h_next:9.2e}  {sigma[m - 1]:9.2e}  {prod:9.2e}  "
            f"{decay_bound(model, m):9.2e}  {krylov_projection_error(sub, p.A):9.2e}"
        )

# %%
# The factorization holds to rounding at every step.
p = make_problem("baart", 64)
s = arnoldi(p.A, p.b_exact, 8)
print("\nbaart(64), m = 8: ||A W - W Hbar|| =", np.linalg.norm(p.A @ s.Wm - s.W @ s.Hbar))
