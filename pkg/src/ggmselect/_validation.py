"""Input validation helpers shared across modules."""

import numbers

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import InvalidInputError


def check_observations(X, transpose=False):
    """Validate an observation matrix (rows = observations).

    Returns a C-contiguous float64 copy with at least two rows and
    two columns and only finite entries.
    """
    try:
        X = check_array(X, dtype=np.float64, ensure_min_samples=2,
                        ensure_min_features=2, ensure_all_finite=True)
    except ValueError as exc:
        raise InvalidInputError(str(exc)) from exc
    if transpose:
        X = np.ascontiguousarray(X.T)
        if X.shape[0] < 2 or X.shape[1] < 2:
            raise InvalidInputError(
                "need at least 2 observations and 2 variables, got shape %r"
                % (X.shape,))
    return X


def check_square_symmetric(m, name="matrix", atol=0.0):
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInputError("%s must be square, got shape %r"
                                % (name, m.shape))
    if m.shape[0] < 1:
        raise InvalidInputError("%s must be non-empty" % name)
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("%s has non-finite entries" % name)
    scale = max(np.max(np.abs(m)), 1.0)
    if not np.allclose(m, m.T, rtol=0.0, atol=atol * scale):
        raise InvalidInputError("%s must be symmetric" % name)
    return m


def check_index(i, size, name="i"):
    if isinstance(i, bool) or not isinstance(i, numbers.Integral):
        raise InvalidInputError("%s must be an integer, got %r" % (name, i))
    if not 0 <= i < size:
        raise InvalidInputError("%s=%d out of range for dimension %d"
                                % (name, i, size))
    return int(i)


def check_pair(i, j, size):
    i = check_index(i, size, "i")
    j = check_index(j, size, "j")
    if i == j:
        raise InvalidInputError("i and j must differ, got i = j = %d" % i)
    return i, j


def check_level(level, name="level"):
    if isinstance(level, bool) or not isinstance(level, numbers.Real):
        raise InvalidInputError("%s must be a real number, got %r"
                                % (name, level))
    level = float(level)
    if not 0.0 < level < 1.0:
        raise InvalidInputError("%s must lie in (0, 1), got %r"
                                % (name, level))
    return level
