"""Gaussian graphical model selection with optimal individual tests.

Each pair of variables is tested for a zero entry of the concentration
matrix with the optimal unbiased (Neyman-structure) test, which reduces
to thresholding the sample partial correlation at ``1 - 2q`` for a
symmetric beta quantile ``q``.  Bonferroni-type procedures combine the
pair tests into a graph estimate, and a Monte-Carlo harness estimates
the resulting family-wise error rate.
"""

from .distributions import (BetaParams, NullCorrDensityParams, beta_quantile,
                            fisher_z, partial_corr_null_cdf, reg_inc_beta,
                            std_normal_quantile)
from .exceptions import (DegenerateMatrixError, GGMError, InvalidInputError,
                         NumericalError)
from .individual import (TestConfig, TestDecision, TestMethod, fisher_z_test,
                         neyman_test, neyman_test_s_space,
                         neyman_thresholds_s_space, partial_corr_exact_test)
from .matrix import (QuadCoeffs, SampleCovariance, cofactor,
                     det_quadratic_coeffs, is_positive_definite,
                     partial_correlation, sample_covariance)
from .multiple import (AdjacencyMatrix, GraphSelector, Procedure,
                       ProcedureConfig, count_false_edges, individual_level,
                       select_graph)
from .simulation import (FwerCurve, FwerExperiment, MvnModel, estimate_fwer,
                         replication_stream, sample_mvn, true_graph)

__version__ = "0.1.0"

__all__ = [
    "AdjacencyMatrix", "BetaParams", "DegenerateMatrixError", "FwerCurve",
    "FwerExperiment", "GGMError", "GraphSelector", "InvalidInputError",
    "MvnModel", "NullCorrDensityParams", "NumericalError", "Procedure",
    "ProcedureConfig", "QuadCoeffs", "SampleCovariance", "TestConfig",
    "TestDecision", "TestMethod", "beta_quantile", "cofactor",
    "count_false_edges", "det_quadratic_coeffs", "estimate_fwer",
    "fisher_z", "fisher_z_test", "individual_level", "is_positive_definite",
    "neyman_test", "neyman_test_s_space", "neyman_thresholds_s_space",
    "partial_corr_exact_test", "partial_corr_null_cdf",
    "partial_correlation", "reg_inc_beta", "replication_stream",
    "sample_covariance", "sample_mvn", "select_graph",
    "std_normal_quantile", "true_graph",
]
