"""Sample covariances, cofactors and the determinant quadratic.

Fixing every entry of a symmetric matrix except the mirrored pair
``(i, j)``/``(j, i)`` and writing ``x`` for that pair makes the
determinant a quadratic ``-a x**2 + b x + c``.  Its roots bound the
interval of ``x`` on which the matrix stays positive definite, and the
cofactors of the matrix give the sample partial correlations.

All indices in this module are 0-based.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import (check_index, check_observations, check_pair,
                          check_square_symmetric)
from .exceptions import DegenerateMatrixError, InvalidInputError

__all__ = [
    "SampleCovariance",
    "QuadCoeffs",
    "sample_covariance",
    "cofactor",
    "det",
    "replace_pair",
    "det_quadratic_coeffs",
    "partial_correlation",
    "partial_correlation_matrix",
    "is_positive_definite",
    "check_positive_definite",
    "first_nonpositive_minor",
]


def _readonly(a):
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SampleCovariance:
    """Symmetric matrix of sample covariances and the sample size behind it.

    Attributes
    ----------
    s : ndarray of shape (n_features, n_features)
        Read-only, exactly symmetric.
    n : int
        Number of observations used to compute ``s``.
    """

    s: np.ndarray
    n: int

    def __post_init__(self):
        s = check_square_symmetric(self.s, "s", atol=1e-12)
        # Symmetrize bit-for-bit so downstream code may rely on s == s.T.
        s = 0.5 * (s + s.T)
        if np.any(np.diag(s) < 0):
            raise InvalidInputError("diagonal of a covariance must be >= 0")
        if int(self.n) != self.n or self.n < 1:
            raise InvalidInputError("n must be a positive integer, got %r"
                                    % (self.n,))
        object.__setattr__(self, "s", _readonly(s))
        object.__setattr__(self, "n", int(self.n))

    @property
    def n_features(self):
        return self.s.shape[0]


@dataclass(frozen=True)
class QuadCoeffs:
    """Coefficients of ``det(S(x)) = -a x**2 + b x + c`` for one pair.

    ``x1 < x2`` are the real roots of ``a x**2 - b x - c = 0``; the
    matrix ``S(x)`` is positive definite exactly for ``x1 < x < x2``.
    Differentiating gives ``(a x - b/2) = -S_ij(x)``, the negated (i, j)
    cofactor, so the partial correlation of ``S(x)`` is
    ``(a x - b/2) / sqrt(b**2/4 + a c)``, rising from -1 at ``x1`` to 1
    at ``x2``.
    """

    a: float
    b: float
    c: float
    x1: float
    x2: float
    i: int
    j: int

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        return -self.a * x * x + self.b * x + self.c

    @property
    def half_width(self):
        """``sqrt(b**2/4 + a c) / a``, half the length of the PD interval."""
        return 0.5 * (self.x2 - self.x1)


def sample_covariance(data, ddof=0, transpose=False):
    """Sample covariance matrix of an observation matrix.

    Parameters
    ----------
    data : array-like of shape (n_samples, n_features)
        Rows are observations, columns are variables.
    ddof : {0, 1}, default=0
        The divisor is ``n - ddof``.  The default ``1/n`` divisor is the
        one the Wishart reduction of the tests is written for.
    transpose : bool, default=False
        Treat ``data`` as (n_features, n_samples).

    Returns
    -------
    SampleCovariance
    """
    X = check_observations(data, transpose=transpose)
    if ddof not in (0, 1):
        raise InvalidInputError("ddof must be 0 or 1, got %r" % (ddof,))
    n = X.shape[0]
    centered = X - X.mean(axis=0)
    s = centered.T @ centered / (n - ddof)
    return SampleCovariance(s, n)


def _as_matrix(m):
    if isinstance(m, SampleCovariance):
        return m.s
    return check_square_symmetric(m, atol=1e-12)


def det(m):
    """Determinant via LU factorization with partial pivoting."""
    m = np.asarray(m, dtype=np.float64)
    if m.shape == (0, 0):
        return 1.0
    return float(np.linalg.det(m))


def cofactor(m, i, j):
    """``(-1)**(i+j)`` times the minor of ``m`` deleting row i, column j."""
    m = _as_matrix(m)
    size = m.shape[0]
    i = check_index(i, size, "i")
    j = check_index(j, size, "j")
    minor = np.delete(np.delete(m, i, axis=0), j, axis=1)
    sign = -1.0 if (i + j) % 2 else 1.0
    return sign * det(minor)


def replace_pair(m, i, j, x):
    """Copy of ``m`` with entries (i, j) and (j, i) set to ``x``."""
    out = np.array(_as_matrix(m), dtype=np.float64, copy=True)
    out[i, j] = out[j, i] = x
    return out


def _stable_roots(a, b, c):
    # Roots of a x^2 - b x - c = 0, a > 0, discriminant already >= 0.
    disc = b * b + 4.0 * a * c
    sq = np.sqrt(max(disc, 0.0))
    if b >= 0:
        big = (b + sq) / (2.0 * a)
    else:
        big = (b - sq) / (2.0 * a)
    if big == 0.0:
        return 0.0, 0.0
    small = -c / (a * big)
    return (small, big) if small <= big else (big, small)


def _fit_quadratic(m, i, j, center, h):
    # Exact interpolation of det at center - h, center, center + h in the
    # local variable t = x - center: det = -a t**2 + b t + c.
    f_minus = det(replace_pair(m, i, j, center - h))
    f_zero = det(replace_pair(m, i, j, center))
    f_plus = det(replace_pair(m, i, j, center + h))
    a = (2.0 * f_zero - f_plus - f_minus) / (2.0 * h * h)
    b = (f_plus - f_minus) / (2.0 * h)
    scale = max(abs(f_minus), abs(f_zero), abs(f_plus))
    return a, b, f_zero, scale


def det_quadratic_coeffs(S, i, j):
    """Quadratic coefficients of the determinant in the (i, j) entry.

    The determinant ``det(S(x))`` is first sampled at ``x = -d, 0, d``
    with ``d = sqrt(s_ii s_jj)``.  A narrow positive definite interval
    far from 0 is poorly resolved by those nodes, so the fit is repeated
    at the vertex of the first fit and at one half-width on either side
    of it; the roots come from that local fit.

    Returns
    -------
    QuadCoeffs

    Raises
    ------
    DegenerateMatrixError
        If ``a <= 0`` or the discriminant ``b**2 + 4ac`` is not positive,
        i.e. no value of the entry makes the matrix positive definite.
    """
    m = _as_matrix(S)
    i, j = check_pair(i, j, m.shape[0])
    if i > j:
        i, j = j, i
    d = np.sqrt(m[i, i] * m[j, j])
    if not d > 0:
        d = max(np.max(np.abs(m)), 1.0)
    a, b, c, scale = _fit_quadratic(m, i, j, 0.0, d)
    if not a * d * d > 1e-12 * scale:
        raise DegenerateMatrixError(
            "leading coefficient a=%r is not positive for pair (%d, %d); "
            "the complementary principal minor vanishes" % (a, i, j))
    disc = b * b + 4.0 * a * c
    if disc < -1e-9 * (b * b + 4.0 * abs(a * c)):
        raise DegenerateMatrixError(
            "negative discriminant %r for pair (%d, %d): no positive "
            "definite completion" % (disc, i, j))
    if disc <= 0.0:
        raise DegenerateMatrixError(
            "empty positive definite interval for pair (%d, %d)" % (i, j))

    center = b / (2.0 * a)
    half = np.sqrt(disc) / (2.0 * a)
    a_loc, b_loc, c_loc, _ = _fit_quadratic(m, i, j, center, half)
    disc_loc = b_loc * b_loc + 4.0 * a_loc * c_loc
    if a_loc > 0 and disc_loc > 0:
        shift = b_loc / (2.0 * a_loc)
        w = np.sqrt(disc_loc) / (2.0 * a_loc)
        x1, x2 = center + shift - w, center + shift + w
        a = a_loc
        b = b_loc + 2.0 * a_loc * center
        c = c_loc - b_loc * center - a_loc * center * center
    else:
        x1, x2 = _stable_roots(a, b, c)
    return QuadCoeffs(a=a, b=b, c=c, x1=x1, x2=x2, i=i, j=j)


def is_positive_definite(m):
    """True iff ``m`` is symmetric positive definite (Cholesky succeeds).

    Semidefinite and indefinite matrices return False.
    """
    if isinstance(m, SampleCovariance):
        m = m.s
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        return False
    if not np.all(np.isfinite(m)):
        return False
    try:
        L = np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        return False
    # Rounding can leave a tiny positive pivot on an exactly singular
    # matrix; pivots must exceed a few ulps of the matching diagonal entry.
    pivots = np.diag(L) ** 2
    floor = 64 * m.shape[0] * np.finfo(np.float64).eps * np.diag(m)
    return bool(np.all(pivots > floor))


def first_nonpositive_minor(m):
    """Order k of the first leading principal minor <= 0, or None."""
    m = np.asarray(m, dtype=np.float64)
    for k in range(1, m.shape[0] + 1):
        if not is_positive_definite(m[:k, :k]):
            return k
    return None


def check_positive_definite(m, name="sample covariance"):
    m = _as_matrix(m)
    if not is_positive_definite(m):
        k = first_nonpositive_minor(m)
        raise DegenerateMatrixError(
            "%s is not positive definite: leading principal minor of "
            "order %s is not positive" % (name, k), minor=k)
    return m


def partial_correlation(S, i, j):
    """Sample partial correlation ``-S_ij / sqrt(S_ii S_jj)`` from cofactors.

    Parameters
    ----------
    S : SampleCovariance or array-like
        Positive definite covariance matrix.
    i, j : int
        Distinct 0-based variable indices.

    Returns
    -------
    float in [-1, 1]
    """
    m = check_positive_definite(S)
    i, j = sorted(check_pair(i, j, m.shape[0]))
    cii = cofactor(m, i, i)
    cjj = cofactor(m, j, j)
    denom = cii * cjj
    if not denom > 0:
        raise DegenerateMatrixError(
            "diagonal cofactors product %r is not positive" % denom)
    r = -cofactor(m, i, j) / np.sqrt(denom)
    return float(np.clip(r, -1.0, 1.0))


def partial_correlation_matrix(S):
    """All sample partial correlations at once, from a Cholesky inverse.

    The cofactor matrix of a positive definite ``S`` is ``det(S)``
    times its inverse, so the ratios coincide with
    :func:`partial_correlation`.  The diagonal is set to 1.
    """
    m = check_positive_definite(S)
    L = np.linalg.cholesky(m)
    Linv = np.linalg.inv(L)
    precision = Linv.T @ Linv
    return _precision_to_partial(precision)


def _precision_to_partial(precision):
    d = np.sqrt(np.diag(precision))
    r = -precision / np.outer(d, d)
    r = 0.5 * (r + r.T)
    np.fill_diagonal(r, 1.0)
    return np.clip(r, -1.0, 1.0)
