"""``kaczmarz-opt`` command line entry point.

Exit codes: 0 success, 2 invalid configuration or input, 3 numerical failure.
Every subcommand accepts ``--config FILE`` with ``key=value`` lines mirroring
the long flags; flags given on the command line take precedence.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .errors import NumericalError
from .experiment import METHODS, ExperimentConfig, InvalidConfigError, emit_csv, run_experiment
from .io import read_matrix, read_vector
from .kaczmarz import Cyclic, Randomized, row_norm_distribution, run_solver
from .linalg import row_normalize
from .optimizers import optimize_dopt, optimize_lp, optimize_maximin

EXIT_INVALID = 2
EXIT_NUMERICAL = 3
_FLAGS = {"regenerate_per_trial", "cyclic"}


def _config_args(path: str) -> list[str]:
    args = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidConfigError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            flag = "--" + key.replace("_", "-")
            if key in _FLAGS:
                if value.lower() in ("1", "true", "yes", "on"):
                    args.append(flag)
            else:
                args += [flag, value]
    return args


def _methods(text: str) -> tuple[str, ...]:
    names = tuple(s.strip().lower() for s in text.split(",") if s.strip())
    for name in names:
        if name not in METHODS:
            raise argparse.ArgumentTypeError(f"unknown method {name!r}")
    return names


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kaczmarz-opt", description="Randomized Kaczmarz with optimized row distributions.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Monte-Carlo comparison of row distributions")
    run.add_argument("--config")
    run.add_argument("--m", type=int, default=200)
    run.add_argument("--n", type=int, default=20)
    run.add_argument("--trials", type=int, default=2000)
    run.add_argument("--steps", type=int, default=500)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--methods", type=_methods, default=METHODS)
    run.add_argument("--dopt-iters", type=int, default=10)
    run.add_argument("--maximin-tol", type=float, default=1e-7)
    run.add_argument("--regenerate-per-trial", action="store_true")
    run.add_argument("--out", required=True)

    opt = sub.add_parser("optimize", help="compute a row distribution for a matrix file")
    opt.add_argument("--config")
    opt.add_argument("--matrix", required=True)
    opt.add_argument("--method", choices=("maximin", "lp", "dopt"), default="maximin")
    opt.add_argument("--tol", type=float, default=None)
    opt.add_argument("--iters", type=int, default=10, help="D-optimal iterations")

    solve = sub.add_parser("solve", help="run the solver; print squared residuals per step")
    solve.add_argument("--config")
    solve.add_argument("--matrix", required=True)
    solve.add_argument("--rhs", required=True)
    solve.add_argument("--p", help="row distribution file; row-norm distribution if omitted")
    solve.add_argument("--steps", type=int, default=1000)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--cyclic", action="store_true")
    return parser


def _parse(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        # file values go first so explicit flags override them
        file_args = _config_args(args.config)
        args = parser.parse_args([argv[0]] + file_args + list(argv[1:]))
    return args


def _cmd_run(args) -> int:
    cfg = ExperimentConfig(
        m=args.m, n=args.n, trials=args.trials, steps=args.steps, seed=args.seed,
        methods=args.methods, dopt_iters=args.dopt_iters, maximin_tol=args.maximin_tol,
        output_dir=args.out, regenerate_per_trial=args.regenerate_per_trial,
    )
    result = run_experiment(cfg)
    emit_csv(result, args.out)
    for name, msg in result.failures.items():
        print(f"{name}: {msg}", file=sys.stderr)
    return EXIT_NUMERICAL if result.failures else 0


def _cmd_optimize(args) -> int:
    A = read_matrix(args.matrix)
    B = row_normalize(A).B
    try:
        if args.method == "maximin":
            res = optimize_maximin(B, tol=args.tol or 1e-7)
        elif args.method == "lp":
            res = optimize_lp(B, tol=args.tol or 1e-9)
        else:
            res = optimize_dopt(row_norm_distribution(A), B, iters=args.iters)
    except NumericalError as exc:
        print(f"{args.method}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    sys.stdout.write("".join(repr(float(v)) + "\n" for v in res.p_hat))
    return 0


def _cmd_solve(args) -> int:
    A = read_matrix(args.matrix)
    b = read_vector(args.rhs)
    if args.cyclic:
        scheme = Cyclic()
    else:
        p = read_vector(args.p) if args.p else row_norm_distribution(A)
        scheme = Randomized(p, seed=args.seed)
    rec = run_solver(A, b, steps=args.steps, scheme=scheme)
    out = ["step,squared_residual"]
    out += [f"{j},{float(v)!r}" for j, v in enumerate(rec.squared_errors)]
    sys.stdout.write("\n".join(out) + "\n")
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parse(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (InvalidConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    handler = {"run": _cmd_run, "optimize": _cmd_optimize, "solve": _cmd_solve}[args.command]
    try:
        return handler(args)
    except NumericalError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
