"""
Choosing lambda by projected GCV
================================

At step m the projected GCV function ``G_m`` needs only the small pair
``(Hbar_m, L_m)``. Its minimizer ``lambda_m`` is compared with the minimizer
of the full GCV function and with the error-optimal ``lambda``.
"""

import math

import numpy as np

from atgcv.arnoldi import arnoldi, project_regularizer
from atgcv.gcv import ProjectedGcv, full_gcv_lambda, minimize_gcv, optimal_lambda
from atgcv.problems import add_noise, deriv1, make_problem

p = make_problem("shaw", 120)
L = deriv1(120)
b = add_noise(p.b_exact, 1e-2, seed=0)

lam_full, curve = full_gcv_lambda(p.A, L, b)
lam_opt = optimal_lambda(p.A, L, b, p.x_true)
print(f"full GCV lambda {lam_full:.3e}, error-optimal lambda {lam_opt:.3e}")
print(f"full GCV spread over the grid: min {curve.values.min():.3e}, max {curve.values.max():.3e}")

s = arnoldi(p.A, b, 12)
for m in range(1, s.m + 1):
    sub = s.truncated(m)
    G = ProjectedGcv(sub.Hbar, project_regularizer(L, sub), sub.beta, 120)
    lam, _ = minimize_gcv(G, *G.gamma_range())
    print(f"m = {m:2d}: lambda_m = {lam:.3e}  ({math.log10(lam / lam_full):+.2f} decades from full GCV)")

# %%
# Rescaling b leaves every minimizer unchanged.
G = ProjectedGcv(s.Hbar, project_regularizer(L, s), s.beta, 120)
G10 = ProjectedGcv(s.Hbar, project_regularizer(L, s), 10 * s.beta, 120)
print("G(10 b) / G(b) at lambda = 0.05:", G10(0.05) / G(0.05))
