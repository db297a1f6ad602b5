"""
Image deblurring
================

A 64 x 64 phantom is blurred by ``kron(T, T)`` (Gaussian, band 7, sigma 2)
and perturbed by 1% noise, then restored with ``L = I (x) L1 + L1 (x) I``.
The blur is never assembled. Output images go to ``demo_out/``.
"""

import os

from atgcv.driver import deblur_config, deblur_image
from atgcv.pgm import write_pgm
from atgcv.problems import BlurConfig, checkerboard, phantom

out = "demo_out"
os.makedirs(out, exist_ok=True)
for label, img in [("phantom", phantom(64)), ("checkerboard", checkerboard(64))]:
    rep, observed, restored = deblur_image(img, BlurConfig(n=64, band=7, sigma=2.0), deblur_config(noise=1e-2))
    print(
        f"{label}: {rep.m} iterations ({rep.terminated_by}), lambda = {rep.lambda_final:.3e}, "
        f"relative error {rep.extras['observed_rel_error']:.3f} -> {rep.relative_error:.3f}"
    )
    write_pgm(os.path.join(out, f"{label}_true.pgm"), img)
    write_pgm(os.path.join(out, f"{label}_observed.pgm"), observed)
    write_pgm(os.path.join(out, f"{label}_restored.pgm"), restored)
