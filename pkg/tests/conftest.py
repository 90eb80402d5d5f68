import numpy as np
import pytest

from ggmselect.matrix import SampleCovariance


def random_spd(rng, N, cond=50.0):
    Q, _ = np.linalg.qr(rng.standard_normal((N, N)))
    w = np.exp(rng.uniform(0, np.log(cond), N))
    m = (Q * w) @ Q.T
    return 0.5 * (m + m.T)


def random_sample_cov(rng, N, n, cov=None):
    if cov is None:
        cov = random_spd(rng, N)
    X = rng.multivariate_normal(np.zeros(N), cov, size=n)
    c = X - X.mean(axis=0)
    return SampleCovariance(c.T @ c / n, n)


def random_symmetric(rng, N):
    m = rng.standard_normal((N, N))
    return 0.5 * (m + m.T)


@pytest.fixture
def rng():
    return np.random.default_rng(20150601)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
