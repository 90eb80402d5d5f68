"""Command-line interface.

Exit codes: 0 success, 2 invalid input or usage, 3 sample covariance not
positive definite, 4 numerical failure.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from .distributions import NullCorrDensityParams, partial_corr_null_quantile
from .exceptions import DegenerateMatrixError, InvalidInputError, NumericalError
from .individual import fisher_z_threshold, neyman_quantile, null_K
from .io import format_dense, format_edge_list, read_observations
from .multiple import FISHER_SCALES, GraphSelector, Procedure, n_pairs
from .simulation import (DEFAULT_REPLICATIONS, FwerExperiment, MvnModel,
                         estimate_fwer)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NOT_PD = 3
EXIT_NUMERICAL = 4


def _fmt(x):
    return repr(float(x))


def parse_grid(spec):
    """Parse ``"4:40"``, ``"10:100:5"`` or ``"12,15,30"`` (inclusive ranges)."""
    values = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            raise argparse.ArgumentTypeError("empty grid element in %r" % spec)
        try:
            pieces = [int(p) for p in part.split(":")]
        except ValueError:
            raise argparse.ArgumentTypeError(
                "grid element %r is not an integer or range" % part) from None
        if len(pieces) == 1:
            values.extend(pieces)
        elif len(pieces) in (2, 3):
            lo, hi = pieces[0], pieces[1]
            step = pieces[2] if len(pieces) == 3 else 1
            if step <= 0 or hi < lo:
                raise argparse.ArgumentTypeError("bad range %r" % part)
            values.extend(range(lo, hi + 1, step))
        else:
            raise argparse.ArgumentTypeError("bad range %r" % part)
    return values


def _alpha(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("alpha must be a number") from None
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError("alpha must lie in (0, 1)")
    return v


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def _methods(text):
    try:
        return [Procedure.parse(m.strip()) for m in text.split(",")]
    except InvalidInputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ggmselect",
        description="Concentration graph selection with Bonferroni FWER "
                    "control and Monte-Carlo FWER curves.",
        epilog="Exit codes: 0 ok, 2 invalid input, 3 covariance not "
               "positive definite, 4 numerical failure.")
    sub = parser.add_subparsers(dest="command", required=True)

    sel = sub.add_parser(
        "select", help="select a graph from an observation CSV",
        description="Rows are observations and columns are variables "
                    "(use --transpose for the other layout). An optional "
                    "header line is skipped.")
    sel.add_argument("input", help="observation CSV")
    sel.add_argument("--alpha", type=_alpha, default=0.1,
                     help="family-wise error level (default 0.1)")
    sel.add_argument("--method", type=Procedure.parse, default="delta2",
                     help="delta1 (Fisher z) or delta2 (Neyman); "
                          "default delta2")
    sel.add_argument("--edges", help="edge list output (default "
                                     "<input>.edges.txt)")
    sel.add_argument("--matrix", help="dense 0/1 output (default "
                                      "<input>.adjacency.csv)")
    sel.add_argument("--transpose", action="store_true",
                     help="input rows are variables, columns observations")
    sel.add_argument("--unbiased", action="store_true",
                     help="use the 1/(n-1) covariance divisor instead of 1/n")
    sel.add_argument("--fisher-scale", choices=FISHER_SCALES, default="n")

    sim = sub.add_parser("simulate", help="estimate FWER curves")
    sim.add_argument("--n-vars", type=_positive_int, required=True,
                     help="number of variables N")
    sim.add_argument("--n-grid", type=parse_grid, required=True,
                     help="sample sizes, e.g. 4:40, 10:100:5 or 12,15,30")
    sim.add_argument("--alpha", type=_alpha, default=0.1)
    sim.add_argument("--reps", type=_positive_int,
                     default=DEFAULT_REPLICATIONS)
    sim.add_argument("--methods", type=_methods, default="delta1,delta2")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--workers", type=_positive_int, default=None,
                     help="worker processes (default: CPU count); the "
                          "output does not depend on it")
    sim.add_argument("--covariance",
                     help="CSV with the N x N model covariance "
                          "(default: identity)")
    sim.add_argument("--count-failures", action="store_true",
                     help="count non-PD replications as errors instead of "
                          "excluding them")
    sim.add_argument("--fisher-scale", choices=FISHER_SCALES, default="n")
    sim.add_argument("--output", "-o", help="FWER CSV path (default stdout)")
    sim.add_argument("--summary", action="store_true",
                     help="print a per-method summary")

    thr = sub.add_parser("thresholds",
                         help="print the test thresholds for (N, n, alpha)")
    thr.add_argument("--n-vars", type=_positive_int, required=True)
    thr.add_argument("--n", type=_positive_int, required=True,
                     help="sample size")
    thr.add_argument("--alpha", type=_alpha, default=0.05,
                     help="individual level (default 0.05)")
    thr.add_argument("--bonferroni", action="store_true",
                     help="treat --alpha as family level and divide by "
                          "M = N(N-1)/2")
    return parser


def cmd_select(args, out):
    X = read_observations(args.input)
    selector = GraphSelector(alpha=args.alpha, method=args.method,
                             ddof=1 if args.unbiased else 0,
                             fisher_scale=args.fisher_scale)
    if args.transpose:
        X = X.T
    selector.fit(X)
    adjacency = selector.adjacency_
    stem = args.input
    edges_path = args.edges or stem + ".edges.txt"
    matrix_path = args.matrix or stem + ".adjacency.csv"
    Path(edges_path).write_text(format_edge_list(adjacency))
    Path(matrix_path).write_text(format_dense(adjacency))
    N, n = selector.n_features_in_, selector.n_samples_
    print("method: %s" % Procedure.parse(args.method).value, file=out)
    print("N: %d" % N, file=out)
    print("n: %d" % n, file=out)
    print("M: %d" % n_pairs(N), file=out)
    print("alpha: %s" % _fmt(args.alpha), file=out)
    print("individual_level: %s" % _fmt(selector.individual_level_),
          file=out)
    print("threshold: %s" % _fmt(selector.threshold_), file=out)
    print("edges: %d" % adjacency.n_edges, file=out)
    for i, j in adjacency.edges():
        print("  %d,%d" % (i + 1, j + 1), file=out)
    print("edge_list: %s" % edges_path, file=out)
    print("matrix: %s" % matrix_path, file=out)
    return EXIT_OK


def cmd_simulate(args, out):
    N = args.n_vars
    if N < 2:
        raise InvalidInputError("--n-vars must be >= 2")
    if args.covariance:
        cov = read_observations(args.covariance)
        if cov.shape != (N, N):
            raise InvalidInputError("covariance file is %dx%d, expected "
                                    "%dx%d" % (*cov.shape, N, N))
        model = MvnModel(np.zeros(N), cov)
    else:
        model = MvnModel.independent(N)
    experiment = FwerExperiment(
        model=model, n_grid=tuple(args.n_grid), family_level=args.alpha,
        replications=args.reps, seed=args.seed, methods=tuple(args.methods),
        exclude_failures=not args.count_failures,
        fisher_scale=args.fisher_scale)
    curve = estimate_fwer(experiment, workers=args.workers)
    text = curve.to_csv()
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
        summary_out = out
    else:
        out.write(text)
        summary_out = sys.stderr
    if args.summary:
        for method in experiment.methods:
            rows = curve.for_method(method)
            worst = max(rows, key=lambda r: r.fwer)
            print("%s: max FWER %s at n=%d; %d failures" % (
                method.value, _fmt(worst.fwer), worst.n,
                sum(r.failures for r in rows)), file=summary_out)
    return EXIT_OK


def cmd_thresholds(args, out):
    N, n = args.n_vars, args.n
    if N < 2:
        raise InvalidInputError("--n-vars must be >= 2")
    if n <= N:
        raise InvalidInputError("need n > N, got n=%d, N=%d" % (n, N))
    level = args.alpha / n_pairs(N) if args.bonferroni else args.alpha
    K = null_K(n, N)
    q = neyman_quantile(n, N, level)
    c = partial_corr_null_quantile(NullCorrDensityParams(n, N),
                                   1.0 - level / 2.0)
    z = fisher_z_threshold(level)
    print("N: %d" % N, file=out)
    print("n: %d" % n, file=out)
    print("level: %s" % _fmt(level), file=out)
    print("K: %s" % _fmt(K), file=out)
    print("q: %s" % _fmt(q), file=out)
    print("r_threshold_neyman: %s" % _fmt(1.0 - 2.0 * q), file=out)
    print("r_threshold_exact: %s" % _fmt(c), file=out)
    print("abs_difference: %s" % _fmt(abs(c - (1.0 - 2.0 * q))), file=out)
    print("z_threshold: %s" % _fmt(z), file=out)
    return EXIT_OK


_COMMANDS = {
    "select": cmd_select,
    "simulate": cmd_simulate,
    "thresholds": cmd_thresholds,
}


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args, out)
    except DegenerateMatrixError as exc:
        print("ggmselect: error: %s" % exc, file=sys.stderr)
        return EXIT_NOT_PD
    except NumericalError as exc:
        print("ggmselect: numerical failure: %s" % exc, file=sys.stderr)
        return EXIT_NUMERICAL
    except (InvalidInputError, OSError) as exc:
        print("ggmselect: error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
