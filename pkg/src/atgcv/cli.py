"""Command-line front end: ``atgcv {solve,deblur,diagnose,problem}``.

Exit codes: 0 success, 2 bad arguments, 3 numerical failure, 4 I/O failure.
"""

import argparse
import sys

import numpy as np

from . import driver
from .pgm import PgmError
from .problems import PROBLEMS

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonneg_float(text):
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {text}")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def build_parser():
    parser = argparse.ArgumentParser(
        prog="atgcv", description="Arnoldi-Tikhonov regularization with projected GCV."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run AT-GCV on a 1-D test problem")
    p.add_argument("--problem", required=True, choices=PROBLEMS)
    p.add_argument("--n", type=_positive_int, default=120)
    p.add_argument("--noise", type=_nonneg_float, default=1e-2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reg", choices=("identity", "deriv1"), default="deriv1")
    p.add_argument("--delta", type=_positive_float, default=1e-4)
    p.add_argument("--max-m", type=_positive_int, default=50)
    p.add_argument("--variant", choices=("mgs", "householder"), default="mgs")
    p.add_argument("--stop-rule", choices=("residual", "gcv"), default="residual")
    p.add_argument("--timing", action="store_true", help="record wall times (output no longer reproducible)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("deblur", help="restore a square PGM image")
    p.add_argument("--in", dest="image_in", required=True)
    p.add_argument("--band", type=_positive_int, default=7)
    p.add_argument("--sigma", type=_positive_float, default=2.0)
    p.add_argument("--noise", type=_nonneg_float, default=1e-2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta", type=_positive_float, default=driver.DEBLUR_DELTA)
    p.add_argument("--max-m", type=_positive_int, default=50)
    p.add_argument("--variant", choices=("mgs", "householder"), default="mgs")
    p.add_argument(
        "--observed",
        action="store_true",
        help="treat the input as already blurred and noisy instead of corrupting it",
    )
    p.add_argument("--timing", action="store_true")
    p.add_argument("--out", required=True)

    p = sub.add_parser("diagnose", help="write spectral and decay diagnostics on exact data")
    p.add_argument("--problem", required=True, choices=PROBLEMS)
    p.add_argument("--n", type=_positive_int, default=32)
    p.add_argument("--max-m", type=_positive_int, default=10)
    p.add_argument("--variant", choices=("mgs", "householder"), default="householder")
    p.add_argument("--out", required=True)

    p = sub.add_parser("problem", help="dump A, b and x_true of a test problem as CSV")
    p.add_argument("--name", required=True, choices=PROBLEMS)
    p.add_argument("--n", type=_positive_int, default=32)
    p.add_argument("--out", required=True)
    return parser


def _solve(args):
    cfg = driver.RunConfig(
        problem=args.problem,
        n=args.n,
        noise=args.noise,
        seed=args.seed,
        delta=args.delta,
        max_m=args.max_m,
        regularizer=args.reg,
        variant=args.variant,
        stop_rule=args.stop_rule,
        timing=args.timing,
    )
    rep = driver.run_experiment(cfg, out_dir=args.out)
    print(
        f"{args.problem}: m = {rep.m} ({rep.terminated_by}), lambda = {rep.lambda_final:.6e}, "
        f"relative error = {rep.relative_error:.6e}"
    )


def _deblur(args):
    cfg = driver.deblur_config(
        noise=args.noise,
        seed=args.seed,
        delta=args.delta,
        max_m=args.max_m,
        variant=args.variant,
        timing=args.timing,
    )
    rep = driver.deblur(
        args.image_in, args.out, band=args.band, sigma=args.sigma, cfg=cfg, corrupt=not args.observed
    )
    line = f"deblur: m = {rep.m} ({rep.terminated_by}), lambda = {rep.lambda_final:.6e}"
    if "observed_rel_error" in rep.extras:
        line += f", relative error {rep.extras['observed_rel_error']:.4f} -> {rep.relative_error:.4f}"
    print(line)


def _diagnose(args):
    driver.diagnose(args.problem, args.n, args.max_m, out_dir=args.out, variant=args.variant)


def _problem(args):
    driver.dump_problem(args.name, args.n, args.out)


_COMMANDS = {"solve": _solve, "deblur": _deblur, "diagnose": _diagnose, "problem": _problem}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        _COMMANDS[args.command](args)
    except (OSError, PgmError) as exc:
        print(f"atgcv: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (driver.NumericalFailure, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"atgcv: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        # bad combinations argparse cannot see, e.g. odd N for shaw
        print(f"atgcv: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
