"""Bonferroni-type concentration graph selection.

Two single-step procedures map a sample to an undirected graph by
testing every pair ``i < j`` at the individual level ``alpha / M`` with
``M = N (N - 1) / 2``:

* ``delta1_fisher`` uses the Fisher z test; the two-sided threshold is
  the ``1 - alpha / (N (N - 1))`` normal quantile.  FWER control is only
  asymptotic.
* ``delta2_neyman`` uses the optimal Neyman-structure test with ``q``
  the ``alpha / (N (N - 1))`` quantile of ``Be(K+1, K+1)``.  FWER is
  bounded by ``alpha`` at every sample size.

An edge is present iff its individual hypothesis is rejected.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_level
from .exceptions import DegenerateMatrixError, InvalidInputError
from .individual import fisher_z_threshold, neyman_r_thresholds, null_K
from .matrix import (SampleCovariance, _precision_to_partial,
                     first_nonpositive_minor, is_positive_definite,
                     sample_covariance)

__all__ = [
    "Procedure",
    "ProcedureConfig",
    "AdjacencyMatrix",
    "n_pairs",
    "individual_level",
    "select_graph",
    "select_graph_from_covariance",
    "count_false_edges",
    "GraphSelector",
]

_ALIASES = {
    "delta1": "delta1_fisher",
    "fisher": "delta1_fisher",
    "delta2": "delta2_neyman",
    "neyman": "delta2_neyman",
}


class Procedure(str, Enum):
    DELTA1_FISHER = "delta1_fisher"
    DELTA2_NEYMAN = "delta2_neyman"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(_ALIASES.get(value, value))
        except ValueError:
            raise InvalidInputError(
                "unknown procedure %r; expected one of %s" % (
                    value, ", ".join([m.value for m in cls]
                                     + sorted(_ALIASES)))) from None

    @property
    def short(self):
        return self.value.split("_")[0]


FISHER_SCALES = ("n", "n-N-1")


@dataclass(frozen=True)
class ProcedureConfig:
    """Family level and procedure choice.

    ``fisher_scale`` selects the sample size under the Fisher z square
    root: ``"n"`` (default) or the conventional ``"n-N-1"`` for a
    partial correlation given ``N - 2`` variables.
    """

    fwer_level: float = 0.1
    method: Procedure = Procedure.DELTA2_NEYMAN
    fisher_scale: str = "n"

    def __post_init__(self):
        object.__setattr__(self, "fwer_level",
                           check_level(self.fwer_level, "fwer_level"))
        object.__setattr__(self, "method", Procedure.parse(self.method))
        if self.fisher_scale not in FISHER_SCALES:
            raise InvalidInputError("fisher_scale must be one of %r"
                                    % (FISHER_SCALES,))


class AdjacencyMatrix:
    """Symmetric 0/1 matrix with zero diagonal."""

    __slots__ = ("_g",)

    def __init__(self, g):
        g = np.asarray(g)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise InvalidInputError("adjacency must be square, got shape %r"
                                    % (g.shape,))
        if not np.all((g == 0) | (g == 1)):
            raise InvalidInputError("adjacency entries must be 0 or 1")
        g = g.astype(np.uint8)
        if not np.array_equal(g, g.T):
            raise InvalidInputError("adjacency must be symmetric")
        if np.any(np.diag(g)):
            raise InvalidInputError("adjacency must have a zero diagonal")
        g.setflags(write=False)
        self._g = g

    @classmethod
    def empty(cls, N):
        return cls(np.zeros((N, N), dtype=np.uint8))

    @classmethod
    def from_edges(cls, N, edges):
        """Build from 0-based pairs."""
        g = np.zeros((N, N), dtype=np.uint8)
        for i, j in edges:
            if i == j:
                raise InvalidInputError("self-loop (%d, %d)" % (i, j))
            g[i, j] = g[j, i] = 1
        return cls(g)

    @property
    def g(self):
        return self._g

    @property
    def n_nodes(self):
        return self._g.shape[0]

    def edges(self):
        """0-based ``(i, j)`` pairs with ``i < j``, in row-major order."""
        iu, ju = np.nonzero(np.triu(self._g, 1))
        return [(int(i), int(j)) for i, j in zip(iu, ju)]

    @property
    def n_edges(self):
        return int(np.triu(self._g, 1).sum())

    def __eq__(self, other):
        if not isinstance(other, AdjacencyMatrix):
            return NotImplemented
        return np.array_equal(self._g, other._g)

    def __hash__(self):
        return hash(self._g.tobytes())

    def __repr__(self):
        return "AdjacencyMatrix(N=%d, edges=%r)" % (self.n_nodes,
                                                     self.edges())


def n_pairs(N):
    return N * (N - 1) // 2


def individual_level(fwer_level, N):
    """Per-pair two-sided level ``alpha / M``."""
    return check_level(fwer_level, "fwer_level") / n_pairs(N)


@dataclass(frozen=True)
class _PairRule:
    # Rejection rule |statistic| > bound on the all-pairs statistic matrix.
    method: Procedure
    n: int
    N: int
    level: float
    bound: float
    multiplier: float

    def statistics(self, r):
        if self.method is Procedure.DELTA2_NEYMAN:
            return r
        with np.errstate(divide="ignore"):
            return self.multiplier * np.arctanh(r)

    def reject(self, r):
        return np.abs(self.statistics(r)) > self.bound


def _pair_rule(config, n, N):
    if N < 2:
        raise InvalidInputError("need at least 2 variables")
    level = individual_level(config.fwer_level, N)
    if config.method is Procedure.DELTA2_NEYMAN:
        null_K(n, N)
        lo, hi = neyman_r_thresholds(n, N, level)
        return _PairRule(config.method, n, N, level, hi, 1.0)
    if n <= N:
        raise InvalidInputError("Fisher z procedure needs n > N, got n=%d, "
                                "N=%d" % (n, N))
    eff = n if config.fisher_scale == "n" else n - N - 1
    if eff <= 0:
        raise InvalidInputError("conventional Fisher scale needs n > N + 1")
    return _PairRule(config.method, n, N, level, fisher_z_threshold(level),
                     math.sqrt(eff))


def _boundary_partial_correlations(s):
    # Rank N-1 PSD matrix: adj(S) is proportional to v v^T with v the null
    # vector, so every cofactor partial correlation is -sign(v_i v_j).
    w, V = np.linalg.eigh(s)
    top = max(abs(w[-1]), np.finfo(float).tiny)
    tol = 1e-10 * top
    if w[0] < -tol or abs(w[0]) > tol or (len(w) > 1 and w[1] <= tol):
        return None
    v = V[:, 0]
    if np.any(np.abs(v) < 1e-8):
        return None
    r = -np.sign(np.outer(v, v))
    np.fill_diagonal(r, 1.0)
    return r


def _all_partial_correlations(s):
    if is_positive_definite(s):
        L = np.linalg.cholesky(s)
        Linv = np.linalg.inv(L)
        return _precision_to_partial(Linv.T @ Linv)
    r = _boundary_partial_correlations(s)
    if r is None:
        k = first_nonpositive_minor(s)
        raise DegenerateMatrixError(
            "sample covariance is not positive definite: leading principal "
            "minor of order %s is not positive" % k, minor=k)
    return r


def _graph_from_rejections(reject):
    g = np.triu(reject, 1)
    g = (g | g.T).astype(np.uint8)
    return AdjacencyMatrix(g)


def select_graph_from_covariance(S, config):
    """Run the configured procedure on a sample covariance.

    Parameters
    ----------
    S : SampleCovariance
    config : ProcedureConfig

    Returns
    -------
    AdjacencyMatrix
    """
    if not isinstance(S, SampleCovariance):
        raise InvalidInputError("S must be a SampleCovariance")
    rule = _pair_rule(config, S.n, S.n_features)
    r = _all_partial_correlations(S.s)
    return _graph_from_rejections(rule.reject(r))


def select_graph(data, config, ddof=0, transpose=False):
    """Select a concentration graph from observations.

    Parameters
    ----------
    data : array-like of shape (n_samples, n_features)
    config : ProcedureConfig
    ddof : {0, 1}, default=0
        Covariance divisor ``n - ddof``.
    transpose : bool, default=False
        Data is laid out (n_features, n_samples).

    Returns
    -------
    AdjacencyMatrix

    Raises
    ------
    DegenerateMatrixError
        The sample covariance is not positive definite; ``.minor`` names
        the first non-positive leading principal minor.
    """
    S = sample_covariance(data, ddof=ddof, transpose=transpose)
    return select_graph_from_covariance(S, config)


def count_false_edges(selected, truth):
    """Return ``(false_positives, false_negatives)`` over pairs ``i < j``."""
    if selected.n_nodes != truth.n_nodes:
        raise InvalidInputError("graphs have different sizes: %d vs %d"
                                % (selected.n_nodes, truth.n_nodes))
    sel = np.triu(selected.g, 1).astype(bool)
    tru = np.triu(truth.g, 1).astype(bool)
    return int(np.sum(sel & ~tru)), int(np.sum(~sel & tru))


class GraphSelector(BaseEstimator):
    """Concentration graph selection with Bonferroni FWER control.

    Parameters
    ----------
    alpha : float, default=0.1
        Family-wise error level.
    method : {"delta2_neyman", "delta1_fisher"}, default="delta2_neyman"
        Individual test used for every pair.  ``"delta2"`` and
        ``"delta1"`` are accepted aliases.
    ddof : {0, 1}, default=0
        Covariance divisor ``n - ddof``.
    fisher_scale : {"n", "n-N-1"}, default="n"
        Sample size under the square root of the Fisher statistic.

    Attributes
    ----------
    covariance_ : ndarray of shape (n_features, n_features)
    partial_correlation_ : ndarray of shape (n_features, n_features)
        Sample partial correlations, unit diagonal.
    statistics_ : ndarray of shape (n_features, n_features)
        Test statistic for every pair (``r`` for delta2, ``z`` for delta1).
    threshold_ : float
        A pair is an edge iff ``|statistics_| > threshold_``.
    individual_level_ : float
        ``alpha / M``.
    adjacency_ : AdjacencyMatrix
    n_samples_ : int
    n_features_in_ : int

    Examples
    --------
    >>> import numpy as np
    >>> X = np.random.default_rng(0).standard_normal((200, 4))
    >>> GraphSelector(alpha=0.1).fit(X).adjacency_.n_edges
    0
    """

    def __init__(self, alpha=0.1, method="delta2_neyman", ddof=0,
                 fisher_scale="n"):
        self.alpha = alpha
        self.method = method
        self.ddof = ddof
        self.fisher_scale = fisher_scale

    def _config(self):
        return ProcedureConfig(self.alpha, self.method, self.fisher_scale)

    def fit(self, X, y=None):
        config = self._config()
        S = sample_covariance(X, ddof=self.ddof)
        return self._fit_covariance(S, config)

    def fit_covariance(self, S):
        """Fit from a precomputed :class:`SampleCovariance`."""
        return self._fit_covariance(S, self._config())

    def _fit_covariance(self, S, config):
        if not isinstance(S, SampleCovariance):
            raise InvalidInputError("S must be a SampleCovariance")
        rule = _pair_rule(config, S.n, S.n_features)
        r = _all_partial_correlations(S.s)
        stats = rule.statistics(r)
        np.fill_diagonal(stats, 0.0)
        self.covariance_ = np.array(S.s)
        self.n_samples_ = S.n
        self.n_features_in_ = S.n_features
        self.partial_correlation_ = r
        self.statistics_ = stats
        self.threshold_ = rule.bound
        self.individual_level_ = rule.level
        self.adjacency_ = _graph_from_rejections(rule.reject(r))
        return self

    def predict(self, X=None):
        """Adjacency matrix of the fitted graph as a dense 0/1 array."""
        check_is_fitted(self, "adjacency_")
        return np.array(self.adjacency_.g)

    @property
    def edges_(self):
        check_is_fitted(self, "adjacency_")
        return self.adjacency_.edges()
