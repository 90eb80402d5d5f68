"""Special functions behind the test thresholds.

Under the null hypothesis the sample partial correlation ``r`` has
density proportional to ``(1 - r**2)**K`` on ``[-1, 1]`` with
``K = (n - N - 2) / 2``, so ``(r + 1) / 2`` follows the symmetric beta
law ``Be(K + 1, K + 1)``.  Every threshold used by the individual tests
is a quantile of that law or of the standard normal.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from ._validation import check_level
from .exceptions import InvalidInputError, NumericalError

__all__ = [
    "BetaParams",
    "NullCorrDensityParams",
    "reg_inc_beta",
    "beta_pdf",
    "beta_quantile",
    "std_normal_cdf",
    "std_normal_quantile",
    "partial_corr_null_pdf",
    "partial_corr_null_cdf",
    "partial_corr_null_quantile",
    "fisher_z",
]

_CF_MAX_ITER = 10000
_CF_EPS = 1e-16
_TINY = 1e-300
QUANTILE_MAX_ITER = 200


@dataclass(frozen=True)
class BetaParams:
    """Shape parameters of a beta distribution."""

    alpha_shape: float
    beta_shape: float

    def __post_init__(self):
        for name in ("alpha_shape", "beta_shape"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float, np.floating, np.integer))
                    and math.isfinite(v) and v > 0):
                raise InvalidInputError("%s must be finite and > 0, got %r"
                                        % (name, v))
            object.__setattr__(self, name, float(v))

    @classmethod
    def symmetric(cls, K):
        """``Be(K + 1, K + 1)``."""
        return cls(K + 1.0, K + 1.0)


@dataclass(frozen=True)
class NullCorrDensityParams:
    """Sample size ``n`` and variable count ``N`` of the null correlation law."""

    n: int
    N: int

    def __post_init__(self):
        if int(self.n) != self.n or int(self.N) != self.N:
            raise InvalidInputError("n and N must be integers")
        if self.N < 2:
            raise InvalidInputError("N must be >= 2, got %r" % (self.N,))
        if self.n <= self.N:
            raise InvalidInputError(
                "null partial-correlation law needs n > N, got n=%r, N=%r"
                % (self.n, self.N))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "N", int(self.N))

    @property
    def K(self):
        return (self.n - self.N - 2) / 2.0

    @property
    def beta(self):
        return BetaParams.symmetric(self.K)


def _log_beta(a, b):
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _betacf(a, b, x):
    # Modified Lentz evaluation of the incomplete beta continued fraction.
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise NumericalError(
        "incomplete beta continued fraction did not converge "
        "(a=%r, b=%r, x=%r)" % (a, b, x))


def _reg_inc_beta(a, b, x):
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = (a * math.log(x) + b * math.log1p(-x) - _log_beta(a, b))
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _betacf(a, b, x) / a
    return 1.0 - math.exp(log_front) * _betacf(b, a, 1.0 - x) / b


def reg_inc_beta(p, x):
    """Regularized incomplete beta function ``I_x(alpha, beta)``.

    Parameters
    ----------
    p : BetaParams
    x : float in [0, 1]

    Returns
    -------
    float in [0, 1]
    """
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise InvalidInputError("x must lie in [0, 1], got %r" % x)
    value = _reg_inc_beta(p.alpha_shape, p.beta_shape, x)
    return min(max(value, 0.0), 1.0)


def beta_pdf(p, x):
    a, b = p.alpha_shape, p.beta_shape
    if not 0.0 < x < 1.0:
        return 0.0
    return math.exp((a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x)
                    - _log_beta(a, b))


def beta_quantile(p, prob):
    """Inverse of :func:`reg_inc_beta` in ``x``.

    Newton steps on ``I_x - prob`` are kept inside a shrinking bracket;
    any step that leaves the bracket is replaced by bisection.

    Raises
    ------
    NumericalError
        If the iteration cap is reached.
    """
    prob = float(prob)
    if not 0.0 < prob < 1.0:
        raise InvalidInputError("prob must lie in (0, 1), got %r" % prob)
    a, b = p.alpha_shape, p.beta_shape
    lo, hi = 0.0, 1.0
    x = _beta_initial_guess(a, b, prob)
    for _ in range(QUANTILE_MAX_ITER):
        f = _reg_inc_beta(a, b, x) - prob
        if f == 0.0:
            return x
        if f < 0:
            lo = x
        else:
            hi = x
        dens = beta_pdf(p, x)
        step_ok = False
        if dens > 0 and math.isfinite(dens):
            x_new = x - f / dens
            step_ok = lo < x_new < hi
        if not step_ok:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 4e-16 * max(x_new, 1e-300) or hi - lo <= 1e-300:
            x = x_new
            break
        x = x_new
    else:
        raise NumericalError("beta quantile did not converge (a=%r, b=%r, "
                             "prob=%r)" % (a, b, prob))
    # Near 0 or 1 with a shape below 1 the density is unbounded and the
    # neighbouring doubles of x can be further apart in probability.
    resolution = 4.0 * beta_pdf(p, x) * np.spacing(x)
    if abs(_reg_inc_beta(a, b, x) - prob) > max(1e-10, resolution):
        raise NumericalError("beta quantile residual too large (a=%r, b=%r, "
                             "prob=%r)" % (a, b, prob))
    return x


def _beta_initial_guess(a, b, prob):
    # Tail power-law approximations: I_x ~ x^a / (a B) near 0 and
    # 1 - I_x ~ (1-x)^b / (b B) near 1.
    lb = _log_beta(a, b)
    mean = a / (a + b)
    if prob < _reg_inc_beta(a, b, mean):
        x = math.exp((math.log(prob * a) + lb) / a)
        return min(max(x, 1e-300), mean)
    x = 1.0 - math.exp((math.log((1.0 - prob) * b) + lb) / b)
    return max(min(x, 1.0 - 1e-16), mean)


# Rational approximation of the normal quantile (P. J. Acklam), relative
# error below 1.15e-9 before the refinement step.
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def std_normal_cdf(x):
    x = np.asarray(x, dtype=np.float64)
    return 0.5 * erfc(-x / math.sqrt(2.0))


def _acklam(p):
    out = np.empty_like(p)
    low = p < _P_LOW
    high = p > 1.0 - _P_LOW
    mid = ~(low | high)

    q = np.sqrt(-2.0 * np.log(p[low]))
    out[low] = ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4])
                 * q + _C[5])
                / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))

    q = p[mid] - 0.5
    r = q * q
    out[mid] = ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4])
                 * r + _A[5]) * q
                / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4])
                   * r + 1.0))

    q = np.sqrt(-2.0 * np.log1p(-p[high]))
    out[high] = -((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q
                    + _C[4]) * q + _C[5])
                  / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q
                     + 1.0))
    return out


def _normal_quantile_array(p):
    x = _acklam(p)
    # One Halley step against the erfc-based CDF; each tail is refined
    # against its own complement to keep relative accuracy.
    lower = x < 0
    e = np.where(lower,
                 0.5 * erfc(-x / math.sqrt(2.0)) - p,
                 (1.0 - p) - 0.5 * erfc(x / math.sqrt(2.0)))
    u = e * math.sqrt(2.0 * math.pi) * np.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


def std_normal_quantile(prob):
    """Standard normal quantile ``Phi^{-1}(prob)``, accepts scalars or arrays.

    Raises
    ------
    InvalidInputError
        If any probability is outside the open interval (0, 1).
    """
    p = np.asarray(prob, dtype=np.float64)
    if not np.all((p > 0.0) & (p < 1.0)):
        raise InvalidInputError("prob must lie in (0, 1)")
    x = _normal_quantile_array(np.atleast_1d(p))
    if p.ndim == 0:
        return float(x[0])
    return x


def normal_from_uniform(u):
    """Inverse-CDF transform of open-interval uniforms, no validation."""
    return _normal_quantile_array(np.asarray(u, dtype=np.float64))


def partial_corr_null_pdf(params, x):
    """Null density ``(1 - x**2)**K / B(K+1, K+1) / 2**(2K+1)`` on [-1, 1]."""
    x = float(x)
    if not -1.0 < x < 1.0:
        return 0.0
    return 0.5 * beta_pdf(params.beta, 0.5 * (x + 1.0))


def partial_corr_null_cdf(params, x):
    """CDF of a sample partial correlation under ``sigma^{ij} = 0``.

    Parameters
    ----------
    params : NullCorrDensityParams
    x : float in [-1, 1]
    """
    x = float(x)
    if not -1.0 <= x <= 1.0:
        raise InvalidInputError("x must lie in [-1, 1], got %r" % x)
    return reg_inc_beta(params.beta, 0.5 * (x + 1.0))


def partial_corr_null_quantile(params, prob):
    """Inverse of :func:`partial_corr_null_cdf`."""
    return 2.0 * beta_quantile(params.beta, prob) - 1.0


def fisher_z(r, n, scale=None):
    """Fisher transform ``sqrt(n)/2 * log((1+r)/(1-r))``.

    Parameters
    ----------
    r : float in (-1, 1)
    n : int
        Sample size; the multiplier is ``sqrt(n)`` unless ``scale`` is given.
    scale : float, optional
        Replace the ``sqrt(n)`` multiplier, e.g. ``sqrt(n - N - 1)``.
    """
    r = float(r)
    if not -1.0 < r < 1.0:
        raise InvalidInputError("|r| must be < 1 for the Fisher transform, "
                                "got %r" % r)
    mult = math.sqrt(n) if scale is None else float(scale)
    return mult * math.atanh(r)


def symmetric_beta_lower_quantile(K, level):
    """``q`` with ``I_q(K+1, K+1) = level / 2``."""
    level = check_level(level)
    return beta_quantile(BetaParams.symmetric(K), level / 2.0)
