"""Estimation and likelihood-ratio tests for eigenvalues and eigenvectors
of Gaussian random symmetric matrices under the orthogonally invariant
covariance model."""

__version__ = "0.1.0"

from .symcore import (
    CovParams,
    Multiplicities,
    EigenDecomp,
    vecd,
    vecd_inv,
    inner,
    norm_sq,
    eigh_desc,
    block_average,
    matrix_log,
    matrix_exp,
    sym_dim,
)
from .matnormal import build_sigma, log_density, sample, empirical_sigma, sample_mean, group_means
from .onesample import (
    Unrestricted,
    Point,
    FixedEigvecs,
    OrderedCone,
    FixedEigvals,
    Mult,
    FitResult,
    mle,
    mle_fixed_eigvecs,
    mle_ordered_cone,
    mle_fixed_eigvals,
    mle_multiplicities,
    estimate_sigma2,
    estimate_tau,
    eigvec_uncertainty,
    pava,
)
from .twosample import (
    Unrestricted2,
    EqualMeans,
    CommonEigvals,
    FitResult2,
    mle2,
    mle_common_eigvals,
    pooled_sigma2,
    pooled_tau,
)
from .lrt import (
    ChiSq,
    ChiSqApprox,
    ChiSqMix,
    FDist,
    TestResult,
    StatisticError,
    pvalue,
    quantile,
    test_point_unrestricted,
    test_A1,
    test_A2,
    test_C2,
    test_S1,
    test_S2,
    test_S3,
    test_sigma_structure,
    test2_equal_unrestricted,
    test2_S1,
    test2_S2,
    run_config,
)
from .calibrate import (
    ConeWeights,
    CalibrationReport,
    estimate_cone_weights,
    calibrate_null,
    consistency_study,
    cone_boundary_law,
)
