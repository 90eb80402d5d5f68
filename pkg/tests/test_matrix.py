import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from ggmselect.exceptions import DegenerateMatrixError, InvalidInputError
from ggmselect.matrix import (SampleCovariance, cofactor, det,
                              det_quadratic_coeffs, first_nonpositive_minor,
                              is_positive_definite, partial_correlation,
                              partial_correlation_matrix, replace_pair,
                              sample_covariance)

from conftest import random_sample_cov, random_spd, random_symmetric


def laplace_det(m):
    """Recursive first-row cofactor expansion."""
    m = [list(row) for row in m]
    if len(m) == 0:
        return 1.0
    if len(m) == 1:
        return m[0][0]
    total = 0.0
    for k in range(len(m)):
        sub = [row[:k] + row[k + 1:] for row in m[1:]]
        total += (-1) ** k * m[0][k] * laplace_det(sub)
    return total


def brute_force_covariance(X):
    n, N = len(X), len(X[0])
    means = [sum(X[t][i] for t in range(n)) / n for i in range(N)]
    return [[sum((X[t][i] - means[i]) * (X[t][j] - means[j])
                 for t in range(n)) / n for j in range(N)] for i in range(N)]


class TestSampleCovariance:
    def test_two_points(self):
        S = sample_covariance([[0, 0], [2, 2]])
        assert_array_equal(S.s, [[1, 1], [1, 1]])
        assert S.n == 2

    def test_constant_column(self, rng):
        X = rng.standard_normal((6, 3))
        X[:, 1] = 4.0
        S = sample_covariance(X)
        assert_array_equal(S.s[1], 0)
        assert_array_equal(S.s[:, 1], 0)

    def test_matches_double_loop(self, rng):
        X = rng.integers(-5, 6, size=(5, 3)).astype(float)
        assert_allclose(sample_covariance(X).s,
                        brute_force_covariance(X.tolist()), rtol=1e-14,
                        atol=1e-14)

    def test_unbiased_divisor(self, rng):
        X = rng.standard_normal((7, 3))
        assert_allclose(sample_covariance(X, ddof=1).s,
                        np.cov(X, rowvar=False))

    def test_transpose(self, rng):
        X = rng.standard_normal((7, 3))
        assert_array_equal(sample_covariance(X.T, transpose=True).s,
                           sample_covariance(X).s)

    def test_exact_symmetry_and_readonly(self, rng):
        S = sample_covariance(rng.standard_normal((9, 5)))
        assert np.array_equal(S.s, S.s.T)
        with pytest.raises(ValueError):
            S.s[0, 0] = 1.0

    @pytest.mark.parametrize("X", [[[1.0, 2.0]], [[1.0], [2.0]],
                                   [[1.0, np.nan], [2.0, 3.0]]])
    def test_invalid(self, X):
        with pytest.raises(InvalidInputError):
            sample_covariance(X)


class TestCofactor:
    def test_identity(self):
        assert cofactor(np.eye(2), 0, 1) == 0.0

    def test_two_by_two(self):
        assert cofactor([[2, 1], [1, 3]], 0, 1) == pytest.approx(-1.0)

    def test_laplace_oracle(self, rng):
        m = random_symmetric(rng, 4)
        for i, j in itertools.product(range(4), repeat=2):
            minor = np.delete(np.delete(m, i, 0), j, 1)
            expected = (-1) ** (i + j) * laplace_det(minor.tolist())
            assert cofactor(m, i, j) == pytest.approx(expected, rel=1e-12,
                                                      abs=1e-12)

    def test_out_of_range(self):
        with pytest.raises(InvalidInputError):
            cofactor(np.eye(3), 0, 3)
        with pytest.raises(InvalidInputError):
            cofactor(np.eye(3), -1, 0)


class TestDetQuadratic:
    @pytest.mark.parametrize("N", [2, 3])
    def test_identity(self, N):
        q = det_quadratic_coeffs(SampleCovariance(np.eye(N), 10), 0, 1)
        assert q.a == pytest.approx(1.0)
        assert q.b == pytest.approx(0.0, abs=1e-15)
        assert q.c == pytest.approx(1.0)
        assert (q.x1, q.x2) == pytest.approx((-1.0, 1.0))

    def test_direct_determinant(self, rng):
        m = random_spd(rng, 5)
        q = det_quadratic_coeffs(m, 1, 3)
        for x in rng.uniform(-3, 3, 10):
            direct = det(replace_pair(m, 1, 3, x))
            scale = max(abs(direct), abs(q.c), 1e-300)
            assert abs(q(x) - direct) <= 1e-9 * scale

    def test_pair_order_irrelevant(self, rng):
        m = random_spd(rng, 4)
        q1 = det_quadratic_coeffs(m, 0, 2)
        q2 = det_quadratic_coeffs(m, 2, 0)
        assert (q1.a, q1.b, q1.c) == (q2.a, q2.b, q2.c)

    def test_empty_interval(self):
        # Complement of (0, 1) is s_22 = 1 > 0, but s_11 = 0 leaves no PD x.
        m = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        with pytest.raises(DegenerateMatrixError):
            det_quadratic_coeffs(m, 0, 1)

    def test_negative_discriminant(self):
        m = np.array([[1.0, 0.0, 2.0], [0.0, 1.0, 0.0], [2.0, 0.0, 1.0]])
        with pytest.raises(DegenerateMatrixError):
            det_quadratic_coeffs(m, 0, 1)

    def test_zero_leading_coefficient(self):
        m = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        with pytest.raises(DegenerateMatrixError):
            det_quadratic_coeffs(m, 0, 2)

    def test_same_index(self):
        with pytest.raises(InvalidInputError):
            det_quadratic_coeffs(np.eye(3), 1, 1)

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), N=st.integers(2, 8))
    def test_quadratic_identity(self, seed, N):
        rng = np.random.default_rng(seed)
        m = random_spd(rng, N)
        i, j = sorted(rng.choice(N, 2, replace=False))
        q = det_quadratic_coeffs(m, i, j)
        xs = rng.uniform(q.x1 - 1, q.x2 + 1, 10)
        scale = q.a * (q.x2 - q.x1) ** 2 / 4 + abs(q.c)
        for x in xs:
            assert abs(q(x) - det(replace_pair(m, i, j, x))) <= 1e-9 * scale

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), N=st.integers(2, 7))
    def test_interval_property(self, seed, N):
        rng = np.random.default_rng(seed)
        m = random_spd(rng, N)
        i, j = sorted(rng.choice(N, 2, replace=False))
        q = det_quadratic_coeffs(m, i, j)
        assert q.x1 < m[i, j] < q.x2
        scale = q.a * (q.x2 - q.x1) ** 2 / 4
        for u in (0.01, 0.3, 0.5, 0.77, 0.99):
            assert is_positive_definite(
                replace_pair(m, i, j, q.x1 + u * (q.x2 - q.x1)))
        for x in (q.x1, q.x2):
            assert det(replace_pair(m, i, j, x)) <= 1e-8 * scale
        width = q.x2 - q.x1
        for x in (q.x1 - 0.01 * width, q.x2 + 0.01 * width):
            assert not is_positive_definite(replace_pair(m, i, j, x))

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), N=st.integers(2, 7))
    def test_cofactor_coefficient_identity(self, seed, N):
        rng = np.random.default_rng(seed)
        m = random_spd(rng, N)
        i, j = sorted(rng.choice(N, 2, replace=False))
        q = det_quadratic_coeffs(m, i, j)
        Sij = cofactor(m, i, j)
        lhs = q.a * m[i, j] - q.b / 2
        scale = np.sqrt(cofactor(m, i, i) * cofactor(m, j, j))
        # a s - b/2 is minus the cofactor (derivative of det is +2 S_ij).
        assert abs(lhs + Sij) <= 1e-9 * scale
        assert np.sqrt(q.b ** 2 / 4 + q.a * q.c) == pytest.approx(scale,
                                                                 rel=1e-9)


class TestDeterminantDerivative:
    @settings(max_examples=100, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), N=st.integers(3, 6))
    def test_derivative_is_twice_cofactor(self, seed, N):
        rng = np.random.default_rng(seed)
        A = random_symmetric(rng, N)
        i, j = sorted(rng.choice(N, 2, replace=False))
        x = rng.standard_normal()
        h = 1e-5
        fd = (det(replace_pair(A, i, j, x + h))
              - det(replace_pair(A, i, j, x - h))) / (2 * h)
        exact = 2 * cofactor(replace_pair(A, i, j, x), i, j)
        scale = max(abs(exact), np.linalg.norm(A) ** (N - 1) * 1e-3)
        assert abs(fd - exact) <= 1e-6 * scale


def test_derivative_sign_two_by_two():
    # det [[p, x], [x, q]] = pq - x^2 has derivative -2x; the (0, 1)
    # cofactor is -x.
    A = np.array([[2.0, 0.3], [0.3, 5.0]])
    assert cofactor(A, 0, 1) == pytest.approx(-0.3)
    h = 1e-6
    fd = (det(replace_pair(A, 0, 1, 0.3 + h))
          - det(replace_pair(A, 0, 1, 0.3 - h))) / (2 * h)
    assert fd == pytest.approx(-0.6, rel=1e-8)
    assert fd == pytest.approx(2 * cofactor(A, 0, 1), rel=1e-8)


class TestPartialCorrelation:
    def test_two_by_two_is_pearson(self):
        s = np.array([[2.0, 0.7], [0.7, 1.5]])
        assert partial_correlation(SampleCovariance(s, 5), 0, 1) == \
            pytest.approx(0.7 / np.sqrt(3.0), rel=1e-14)

    def test_diagonal(self):
        S = SampleCovariance(np.diag([1.0, 2.0, 3.0, 4.0]), 10)
        for i, j in itertools.combinations(range(4), 2):
            assert partial_correlation(S, i, j) == 0.0

    def test_inverse_oracle(self, rng):
        m = random_spd(rng, 4)
        P = np.linalg.inv(m)
        R = partial_correlation_matrix(m)
        for i, j in itertools.combinations(range(4), 2):
            expected = -P[i, j] / np.sqrt(P[i, i] * P[j, j])
            assert partial_correlation(m, i, j) == pytest.approx(
                expected, rel=1e-10, abs=1e-12)
            assert R[i, j] == pytest.approx(expected, rel=1e-10, abs=1e-12)

    def test_not_pd(self):
        with pytest.raises(DegenerateMatrixError) as info:
            partial_correlation(np.array([[1.0, 2.0], [2.0, 1.0]]), 0, 1)
        assert info.value.minor == 2

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), N=st.integers(2, 6))
    def test_monotone_root_map(self, seed, N):
        rng = np.random.default_rng(seed)
        m = random_spd(rng, N)
        i, j = sorted(rng.choice(N, 2, replace=False))
        q = det_quadratic_coeffs(m, i, j)
        eps = 1e-3 * (q.x2 - q.x1)
        xs = [q.x1 + eps, 0.5 * (q.x1 + q.x2), q.x2 - eps]
        rs = [partial_correlation(replace_pair(m, i, j, x), i, j) for x in xs]
        # Increasing from -1 to 1: raising s_ij raises the partial
        # correlation.
        assert rs[0] < rs[1] < rs[2]
        assert rs[0] < -0.99 and rs[2] > 0.99
        dets = [q.a * x - q.b / 2 for x in xs]
        root = np.sqrt(q.b ** 2 / 4 + q.a * q.c)
        assert_allclose(np.array(dets) / root, rs, atol=1e-9)


class TestPositiveDefinite:
    def test_identity(self):
        assert is_positive_definite(np.eye(3))

    def test_indefinite(self):
        assert not is_positive_definite([[1.0, 2.0], [2.0, 1.0]])
        assert first_nonpositive_minor([[1.0, 2.0], [2.0, 1.0]]) == 2

    def test_semidefinite(self):
        assert not is_positive_definite([[1.0, 1.0], [1.0, 1.0]])
        v = np.array([1.0, 2.0, -1.0])
        assert not is_positive_definite(np.outer(v, v) + np.diag([0, 0, 0]))

    def test_sample_covariance_at_n_equals_N_plus_1(self, rng):
        for _ in range(200):
            S = random_sample_cov(rng, 3, 4, cov=np.eye(3))
            assert is_positive_definite(S.s)

    def test_rank_deficient_sample(self, rng):
        S = random_sample_cov(rng, 4, 4, cov=np.eye(4))
        assert not is_positive_definite(S)
