"""
Generalized singular values from the Krylov space
=================================================

Projecting the derivative operator, ``L_m = W_m^T L W_m``, and taking the GSVD
of ``(Hbar_m, L_m)`` gives approximations of the largest generalized singular
values of ``(A, L)``. The dense value ``inf`` belongs to the constant vector,
which ``L`` annihilates; the projection sees it as a large finite value.
"""

import numpy as np

from atgcv.arnoldi import arnoldi, project_regularizer
from atgcv.dense import gsvd
from atgcv.problems import deriv1, make_problem
from atgcv.spectral import approx_gsvd

for name in ("shaw", "baart"):
    p = make_problem(name, 32)
    L = deriv1(32)
    dense = np.sort(gsvd(p.A, L).gamma)[::-1]
    print(f"\n{name}: dense leading values", np.array2string(dense[:5], precision=5))
    for m in (6, 8, 10, 12):
        s = arnoldi(p.A, p.b_exact, m, variant="householder")
        g = np.sort(approx_gsvd(s, project_regularizer(L, s)).gamma)[::-1]
        rel = np.abs(g[1:5] - dense[1:5]) / dense[1:5]
        print(f"  m = {m:2d}: relative error of values 2-5 ", np.array2string(rel, formatter={"float_kind": lambda v: f"{v:.1e}"}))
