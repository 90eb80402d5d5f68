"""Individual tests of ``sigma^{ij} = 0`` for one pair of variables.

Three tests are provided:

* :func:`neyman_test`, the optimal unbiased test of Neyman structure.
  Conditionally on all other sample covariances, ``s_ij`` mapped
  affinely onto the positive definite interval ``(x1, x2)`` is
  ``Be(K+1, K+1)``; by symmetry the two-sided thresholds are the
  ``level/2`` beta quantile ``q`` and ``1 - q``.  It is evaluated on the
  sample partial correlation, where the acceptance region is
  ``2q - 1 <= r <= 1 - 2q``; :func:`neyman_test_s_space` evaluates the
  same test on ``s_ij`` directly.
* :func:`partial_corr_exact_test`, ``|r| <= c`` with ``c`` the exact
  null ``1 - level/2`` quantile of the partial correlation.
* :func:`fisher_z_test`, the asymptotic Fisher z test.

Acceptance regions are closed: a statistic exactly on a threshold is
accepted, for all three tests.
"""

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from ._validation import check_level, check_pair
from .distributions import (NullCorrDensityParams, partial_corr_null_quantile,
                            std_normal_quantile,
                            symmetric_beta_lower_quantile)
from .exceptions import InvalidInputError, NumericalError
from .matrix import (SampleCovariance, check_positive_definite,
                     det_quadratic_coeffs, partial_correlation)

__all__ = [
    "TestMethod",
    "TestConfig",
    "TestDecision",
    "null_K",
    "neyman_quantile",
    "neyman_thresholds_s_space",
    "neyman_r_thresholds",
    "exact_r_threshold",
    "fisher_z_threshold",
    "neyman_test",
    "neyman_test_s_space",
    "partial_corr_exact_test",
    "fisher_z_test",
    "individual_test",
]


class TestMethod(str, Enum):
    __test__ = False

    NEYMAN = "neyman"
    PARTIAL_CORR_EXACT = "partial_corr_exact"
    FISHER_Z = "fisher_z"


@dataclass(frozen=True)
class TestConfig:
    __test__ = False

    level: float
    method: TestMethod = TestMethod.NEYMAN

    def __post_init__(self):
        object.__setattr__(self, "level", check_level(self.level))
        object.__setattr__(self, "method", TestMethod(self.method))


@dataclass(frozen=True)
class TestDecision:
    """Outcome of one individual test.

    ``reject`` is True (edge present) iff ``statistic`` lies outside the
    closed interval ``thresholds``.
    """

    __test__ = False

    reject: bool
    statistic: float
    thresholds: tuple

    def __bool__(self):
        return self.reject


def _decide(statistic, lo, hi):
    return TestDecision(reject=bool(not lo <= statistic <= hi),
                        statistic=float(statistic),
                        thresholds=(float(lo), float(hi)))


def null_K(n, N):
    """Beta exponent ``K = (n - N - 2) / 2``; requires ``n >= N + 1``."""
    if n < N + 1:
        raise InvalidInputError(
            "tests need n >= N + 1 observations, got n=%d, N=%d" % (n, N))
    return (n - N - 2) / 2.0


@lru_cache(maxsize=4096)
def neyman_quantile(n, N, level):
    """Lower ``level/2`` quantile ``q`` of ``Be(K+1, K+1)``."""
    return symmetric_beta_lower_quantile(null_K(n, N), level)


def neyman_r_thresholds(n, N, level):
    """Acceptance interval ``(2q - 1, 1 - 2q)`` for the partial correlation."""
    q = neyman_quantile(n, N, level)
    return 2.0 * q - 1.0, 1.0 - 2.0 * q


@lru_cache(maxsize=4096)
def exact_r_threshold(n, N, level):
    """``c`` with ``P(r <= c) = 1 - level/2`` under the null."""
    level = check_level(level)
    null_K(n, N)
    return partial_corr_null_quantile(NullCorrDensityParams(n, N),
                                      1.0 - level / 2.0)


def fisher_z_threshold(level):
    level = check_level(level)
    return std_normal_quantile(1.0 - level / 2.0)


def _prepare(S, i, j, level):
    if not isinstance(S, SampleCovariance):
        raise InvalidInputError("S must be a SampleCovariance")
    check_positive_definite(S)
    i, j = check_pair(i, j, S.n_features)
    return i, j, check_level(level)


def neyman_thresholds_s_space(S, i, j, level):
    """Thresholds ``(c1, c2)`` on ``s_ij`` of the Neyman-structure test.

    ``c1 = x1 + (x2 - x1) q`` and ``c2 = x2 - (x2 - x1) q`` where
    ``(x1, x2)`` is the positive definite interval of the entry and
    ``q`` the ``level/2`` quantile of ``Be(K+1, K+1)``.
    """
    i, j, level = _prepare(S, i, j, level)
    q = neyman_quantile(S.n, S.n_features, level)
    quad = det_quadratic_coeffs(S, i, j)
    width = quad.x2 - quad.x1
    return quad.x1 + width * q, quad.x2 - width * q


def neyman_test_s_space(S, i, j, level):
    """Neyman-structure test evaluated on ``s_ij`` against ``(c1, c2)``."""
    c1, c2 = neyman_thresholds_s_space(S, i, j, level)
    return _decide(S.s[i, j], c1, c2)


def neyman_test(S, i, j, level, verify=False):
    """Optimal unbiased test of ``sigma^{ij} = 0``.

    Parameters
    ----------
    S : SampleCovariance
        Positive definite, with ``S.n >= N + 1``.
    i, j : int
        Distinct 0-based indices.
    level : float in (0, 1)
        Individual significance level.
    verify : bool, default=False
        Also run :func:`neyman_test_s_space` and raise
        :class:`NumericalError` if the two forms disagree.

    Returns
    -------
    TestDecision
        ``statistic`` is the sample partial correlation and
        ``thresholds`` is ``(2q - 1, 1 - 2q)``.
    """
    i, j, level = _prepare(S, i, j, level)
    lo, hi = neyman_r_thresholds(S.n, S.n_features, level)
    r = partial_correlation(S, i, j)
    decision = _decide(r, lo, hi)
    if verify:
        other = neyman_test_s_space(S, i, j, level)
        # Only a statistic within rounding of the boundary may flip.
        if other.reject != decision.reject and min(abs(r - lo),
                                                   abs(r - hi)) > 1e-9:
            raise NumericalError(
                "r-space and s-space Neyman tests disagree for pair "
                "(%d, %d)" % (i, j))
    return decision


def partial_corr_exact_test(S, i, j, level):
    """Reject iff ``|r| > c``, ``c`` the exact null ``1 - level/2`` quantile."""
    i, j, level = _prepare(S, i, j, level)
    c = exact_r_threshold(S.n, S.n_features, level)
    r = partial_correlation(S, i, j)
    return _decide(r, -c, c)


def fisher_z_test(S, i, j, level, scale=None):
    """Reject iff ``|sqrt(n)/2 log((1+r)/(1-r))|`` exceeds the normal quantile.

    A partial correlation of exactly +-1 gives an infinite statistic and
    is rejected at every level.  ``scale`` replaces the ``sqrt(n)``
    multiplier.
    """
    i, j, level = _prepare(S, i, j, level)
    if S.n <= S.n_features:
        raise InvalidInputError("Fisher z test needs n > N")
    c = fisher_z_threshold(level)
    r = partial_correlation(S, i, j)
    mult = math.sqrt(S.n) if scale is None else float(scale)
    if abs(r) >= 1.0:
        z = math.copysign(math.inf, r)
    else:
        z = mult * math.atanh(r)
    return _decide(z, -c, c)


_DISPATCH = {
    TestMethod.NEYMAN: neyman_test,
    TestMethod.PARTIAL_CORR_EXACT: partial_corr_exact_test,
    TestMethod.FISHER_Z: fisher_z_test,
}


def individual_test(S, i, j, config):
    """Run the test named by ``config.method`` at ``config.level``."""
    return _DISPATCH[config.method](S, i, j, config.level)
