import doctest

import numpy as np
import pytest
from numpy.testing import assert_array_equal
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

import ggmselect.multiple
from ggmselect import GraphSelector
from ggmselect.exceptions import InvalidInputError
from ggmselect.matrix import sample_covariance
from ggmselect.multiple import ProcedureConfig, select_graph


def test_params_round_trip():
    est = GraphSelector(alpha=0.05, method="delta1")
    assert est.get_params() == {"alpha": 0.05, "method": "delta1",
                                "ddof": 0, "fisher_scale": "n"}
    est.set_params(alpha=0.2)
    c = clone(est)
    assert c.get_params() == est.get_params()
    assert c is not est


def test_fit_matches_functional(rng):
    X = rng.standard_normal((40, 5))
    X[:, 2] += X[:, 4]
    for method in ("delta1", "delta2"):
        est = GraphSelector(alpha=0.1, method=method).fit(X)
        g = select_graph(X, ProcedureConfig(0.1, method))
        assert est.adjacency_ == g
        assert_array_equal(est.predict(), g.g)
        assert est.edges_ == g.edges()
        assert est.n_features_in_ == 5 and est.n_samples_ == 40
        np.testing.assert_allclose(est.individual_level_, 0.01)
        reject = np.abs(est.statistics_) > est.threshold_
        assert_array_equal(reject.astype(np.uint8), g.g)


def test_fit_covariance(rng):
    X = rng.standard_normal((25, 3))
    est = GraphSelector().fit_covariance(sample_covariance(X))
    assert est.adjacency_ == GraphSelector().fit(X).adjacency_


def test_not_fitted():
    with pytest.raises(NotFittedError):
        GraphSelector().predict()


def test_bad_params_at_fit(rng):
    X = rng.standard_normal((20, 3))
    with pytest.raises(InvalidInputError):
        GraphSelector(alpha=2.0).fit(X)
    with pytest.raises(InvalidInputError):
        GraphSelector(method="holm").fit(X)
    with pytest.raises(InvalidInputError):
        GraphSelector().fit(np.full((20, 3), np.nan))


def test_docstring_example():
    result = doctest.testmod(ggmselect.multiple, verbose=False)
    assert result.failed == 0 and result.attempted > 0
