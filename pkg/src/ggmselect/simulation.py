"""Monte-Carlo estimation of family-wise error rate curves.

Every replication draws its data from its own random stream, keyed by
``(seed, method, n, replication)``.  Results therefore do not depend on
how replications are split across worker processes.
"""

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_level, check_square_symmetric
from .distributions import normal_from_uniform
from .exceptions import DegenerateMatrixError, InvalidInputError
from .matrix import is_positive_definite
from .multiple import (AdjacencyMatrix, Procedure, ProcedureConfig,
                       _all_partial_correlations, _pair_rule)

__all__ = [
    "MvnModel",
    "FwerExperiment",
    "FwerRow",
    "FwerCurve",
    "true_graph",
    "replication_stream",
    "sample_mvn",
    "estimate_fwer",
    "FWER_CSV_HEADER",
]

FWER_CSV_HEADER = "method,n,fwer,reps,stderr,failures"
DEFAULT_REPLICATIONS = 10_000
_CHUNK = 250
_STREAM_CODES = {None: 0, Procedure.DELTA1_FISHER: 1,
                 Procedure.DELTA2_NEYMAN: 2}


@dataclass(frozen=True)
class MvnModel:
    """Multivariate normal ``N(mean, covariance)``."""

    mean: np.ndarray
    covariance: np.ndarray
    cholesky: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        cov = check_square_symmetric(self.covariance, "covariance",
                                     atol=1e-12)
        mean = np.asarray(self.mean, dtype=np.float64).reshape(-1)
        if cov.shape[0] < 2:
            raise InvalidInputError("model needs at least 2 variables")
        if mean.shape[0] != cov.shape[0]:
            raise InvalidInputError("mean has length %d, covariance is %dx%d"
                                    % (mean.shape[0], *cov.shape))
        if not is_positive_definite(cov):
            raise InvalidInputError("covariance must be positive definite")
        cov = 0.5 * (cov + cov.T)
        for name, value in (("mean", mean), ("covariance", cov),
                            ("cholesky", np.linalg.cholesky(cov))):
            value = np.array(value)
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @classmethod
    def independent(cls, N, variances=None):
        """Zero-mean model with diagonal covariance (identity by default)."""
        if variances is None:
            variances = np.ones(N)
        return cls(np.zeros(N), np.diag(np.asarray(variances, dtype=float)))

    @classmethod
    def from_precision(cls, precision, mean=None):
        precision = np.asarray(precision, dtype=np.float64)
        if mean is None:
            mean = np.zeros(precision.shape[0])
        return cls(mean, np.linalg.inv(precision))

    @property
    def n_features(self):
        return self.covariance.shape[0]


def true_graph(model, zero_tol=1e-12):
    """Graph of the non-zero off-diagonal entries of the precision matrix.

    An entry counts as zero when its magnitude is at most ``zero_tol``
    times the largest magnitude in the precision matrix.
    """
    precision = np.linalg.inv(model.covariance)
    precision = 0.5 * (precision + precision.T)
    scale = np.max(np.abs(precision))
    g = (np.abs(precision) > zero_tol * scale).astype(np.uint8)
    np.fill_diagonal(g, 0)
    return AdjacencyMatrix(g)


def replication_stream(seed, method, n, replication):
    """Independent Philox stream for one replication.

    ``method`` may be a :class:`Procedure`, its name, or None for
    draws not tied to a procedure.
    """
    if method is not None:
        method = Procedure.parse(method)
    if int(seed) != seed or seed < 0:
        raise InvalidInputError("seed must be a non-negative integer")
    ss = np.random.SeedSequence(
        int(seed) & 0xFFFFFFFFFFFFFFFF,
        spawn_key=(_STREAM_CODES[method], int(n), int(replication)))
    return np.random.Generator(np.random.Philox(ss))


def _open_uniforms(stream, size):
    # 52 random bits centred in their cell: strictly inside (0, 1).
    count = int(np.prod(size))
    raw = stream.bit_generator.random_raw(count)
    u = ((raw >> np.uint64(12)).astype(np.float64) + 0.5) * 2.0 ** -52
    return u.reshape(size)


def sample_mvn(model, n, stream):
    """``n`` i.i.d. rows from ``model``, shape ``(n, N)``.

    Standard normals are produced by the inverse normal CDF applied to
    the stream's uniforms and mapped through the Cholesky factor.
    """
    if int(n) != n or n < 1:
        raise InvalidInputError("n must be a positive integer")
    z = normal_from_uniform(_open_uniforms(stream, (int(n),
                                                    model.n_features)))
    return model.mean + z @ model.cholesky.T


@dataclass(frozen=True)
class FwerExperiment:
    """Parameters of a FWER-versus-sample-size study."""

    model: MvnModel
    n_grid: tuple
    family_level: float = 0.1
    replications: int = DEFAULT_REPLICATIONS
    seed: int = 0
    methods: tuple = (Procedure.DELTA1_FISHER, Procedure.DELTA2_NEYMAN)
    exclude_failures: bool = True
    fisher_scale: str = "n"

    def __post_init__(self):
        N = self.model.n_features
        grid = tuple(int(n) for n in self.n_grid)
        if not grid:
            raise InvalidInputError("n_grid must be non-empty")
        bad = [n for n in grid if n < N + 1]
        if bad:
            raise InvalidInputError("every n must be >= N + 1 = %d; got %r"
                                    % (N + 1, bad))
        if self.replications < 1:
            raise InvalidInputError("replications must be >= 1")
        methods = tuple(Procedure.parse(m) for m in self.methods)
        if not methods:
            raise InvalidInputError("at least one method is required")
        object.__setattr__(self, "n_grid", grid)
        object.__setattr__(self, "methods", methods)
        object.__setattr__(self, "replications", int(self.replications))
        object.__setattr__(self, "family_level",
                           check_level(self.family_level, "family_level"))
        if int(self.seed) != self.seed or self.seed < 0:
            raise InvalidInputError("seed must be a non-negative integer")


@dataclass(frozen=True)
class FwerRow:
    method: Procedure
    n: int
    fwer: float
    reps: int
    stderr: float
    failures: int
    false_positives: int = 0

    def csv_line(self):
        return "%s,%d,%s,%d,%s,%d" % (self.method.value, self.n,
                                      _fmt(self.fwer), self.reps,
                                      _fmt(self.stderr), self.failures)


def _fmt(x):
    return repr(float(x))


@dataclass(frozen=True)
class FwerCurve:
    rows: tuple

    def get(self, method, n):
        method = Procedure.parse(method)
        for row in self.rows:
            if row.method is method and row.n == n:
                return row
        raise KeyError((method, n))

    def for_method(self, method):
        method = Procedure.parse(method)
        return [row for row in self.rows if row.method is method]

    def to_csv(self):
        lines = [FWER_CSV_HEADER] + [row.csv_line() for row in self.rows]
        return "\n".join(lines) + "\n"


def _run_chunk(task):
    model, rule, truth, seed, n, start, stop = task
    off_truth = np.triu(truth, 1).astype(bool)
    events = failures = false_pos = 0
    for rep in range(start, stop):
        stream = replication_stream(seed, rule.method, n, rep)
        X = sample_mvn(model, n, stream)
        centered = X - X.mean(axis=0)
        s = centered.T @ centered / n
        try:
            r = _all_partial_correlations(s)
        except DegenerateMatrixError:
            failures += 1
            continue
        fp = int(np.sum(np.triu(rule.reject(r), 1) & ~off_truth))
        false_pos += fp
        events += fp > 0
    return events, failures, false_pos


def estimate_fwer(experiment, workers=None):
    """Estimate FWER for every (method, n) in the experiment.

    Parameters
    ----------
    experiment : FwerExperiment
    workers : int, optional
        Worker processes; defaults to the CPU count.  ``1`` runs inline.
        The result does not depend on this value.

    Returns
    -------
    FwerCurve
        Replications whose sample covariance is not positive definite
        are reported in ``failures``; they are left out of the
        denominator unless ``experiment.exclude_failures`` is False, in
        which case each counts as a familywise error.
    """
    if workers is None:
        workers = os.cpu_count() or 1
    workers = max(1, int(workers))
    model = experiment.model
    N = model.n_features
    truth = np.array(true_graph(model).g)

    keys = []
    tasks = []
    for method in experiment.methods:
        config = ProcedureConfig(experiment.family_level, method,
                                 experiment.fisher_scale)
        for n in experiment.n_grid:
            rule = _pair_rule(config, n, N)
            for start in range(0, experiment.replications, _CHUNK):
                stop = min(start + _CHUNK, experiment.replications)
                keys.append((method, n))
                tasks.append((model, rule, truth, experiment.seed, n,
                              start, stop))

    if workers == 1:
        results = map(_run_chunk, tasks)
        totals = _aggregate(keys, results)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            totals = _aggregate(keys, pool.map(_run_chunk, tasks))

    rows = []
    for method in experiment.methods:
        for n in experiment.n_grid:
            events, failures, false_pos = totals[(method, n)]
            reps = experiment.replications
            if experiment.exclude_failures:
                reps -= failures
            else:
                events += failures
            p = events / reps if reps else math.nan
            se = math.sqrt(p * (1.0 - p) / reps) if reps else math.nan
            rows.append(FwerRow(method, n, p, reps, se, failures, false_pos))
    return FwerCurve(tuple(rows))


def _aggregate(keys, results):
    totals = {}
    for key, (events, failures, false_pos) in zip(keys, results):
        e, f, fp = totals.get(key, (0, 0, 0))
        totals[key] = (e + events, f + failures, fp + false_pos)
    return totals
