"""Likelihood-ratio statistics and reference distributions.

Every test reduces to a difference of projection distances of the sample
mean(s) under the null and alternative parameter sets. With known
(sigma2, tau) the affine cases are exactly chi-square, and the mean-shift
cases have F variants when the covariance is estimated; the curved and
cone cases are asymptotic (chi-square or chi-square mixture). When no
covariance is supplied, tau is estimated under the null fit, sigma2
follows, and both are plugged into the statistic, with the reference
distribution flagged as asymptotic-only.

Test identifiers (`test_id` on results and in CLI configs):

==========  ====================================================
a0          mean equals a given point vs. unrestricted
a1          eigenvalues equal a given point, eigenvectors fixed
a2          mean diagonalized by a given frame vs. unrestricted
c2          frame given and eigenvalues ordered (cone test)
s1          mean equals a given point vs. free eigenvectors
s2          spectrum equals a given point, eigenvectors free
s3          spectrum has a given multiplicity pattern
cov-check   covariance is orthogonally invariant
2a0         two-sample equal means vs. unrestricted
2s1         two samples share a spectrum (pattern known)
2s2         equal means given a shared spectrum
==========  ====================================================
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import special
from .symcore import (
    CovParams,
    Multiplicities,
    block_average,
    check_symmetric,
    eigh_desc,
    norm_sq,
    sym_dim,
)
from .matnormal import empirical_sigma, group_means, sample_mean
from .onesample import (
    FixedEigvals,
    FixedEigvecs,
    Mult,
    OrderedCone,
    Point,
    Unrestricted,
    estimate_sigma2,
    mle,
)
from .twosample import (
    CommonEigvals,
    EqualMeans,
    FitResult2,
    Unrestricted2,
    mle2,
    pooled_sigma2,
    pooled_tau,
)

CLAMP = 1e-9

_PLUGIN_NOTE = "covariance parameters estimated under the null fit"
_ASYMPTOTIC_NOTE = "reference distribution is asymptotic only"


class StatisticError(RuntimeError):
    """A nested-model statistic came out negative beyond rounding tolerance."""


@dataclass(frozen=True)
class ChiSq:
    """Exact chi-square reference with df degrees of freedom."""

    df: float


@dataclass(frozen=True)
class ChiSqApprox:
    """Chi-square reference valid asymptotically only."""

    df: float


@dataclass(frozen=True)
class FDist:
    df1: float
    df2: float


@dataclass(frozen=True)
class ChiSqMix:
    """Mixture of chi-squares; a zero-df component is a point mass at 0."""

    weights: tuple
    dfs: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < 0.0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("mixture weights must be nonnegative and sum to 1")
        if len(self.weights) != len(self.dfs):
            raise ValueError("weights and dfs must have equal length")
        object.__setattr__(self, "weights", tuple(float(x) for x in self.weights))
        object.__setattr__(self, "dfs", tuple(float(x) for x in self.dfs))


@dataclass(eq=False)
class TestResult:
    statistic: float
    dist: object
    p_value: float
    fit_null: object
    fit_alt: object
    test_id: str
    warnings: tuple = field(default_factory=tuple)


def pvalue(dist, t):
    """Upper-tail probability of the reference distribution at t."""
    if not math.isfinite(t):
        raise ValueError("statistic must be finite, got %r" % t)
    if isinstance(dist, (ChiSq, ChiSqApprox)):
        return special.chi2_sf(t, dist.df)
    if isinstance(dist, FDist):
        return special.f_sf(t, dist.df1, dist.df2)
    if isinstance(dist, ChiSqMix):
        return float(sum(w * special.chi2_sf(t, df)
                         for w, df in zip(dist.weights, dist.dfs)))
    raise TypeError("unknown reference distribution %r" % (dist,))


def quantile(dist, prob):
    """Quantile of the reference distribution by bisection on the tail."""
    if not 0.0 <= prob < 1.0:
        raise ValueError("prob must be in [0, 1), got %r" % prob)
    if prob == 0.0:
        return 0.0
    target = 1.0 - prob
    hi = 1.0
    while pvalue(dist, hi) > target:
        hi *= 2.0
        if hi > 1e12:
            raise RuntimeError("quantile bracket failed")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if pvalue(dist, mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _clamp(t):
    # nested minima cannot differ by less than 0; allow rounding dust only
    if t < 0.0:
        if t < -CLAMP:
            raise StatisticError(
                "nested-model statistic is negative beyond rounding: %g" % t)
        return 0.0
    return float(t)


def _result(test_id, t, dist, fit_null, fit_alt, plugin):
    t = _clamp(t)
    if isinstance(dist, (ChiSq, ChiSqApprox)) and dist.df == 0 and t <= CLAMP:
        # df 0 means the null and alternative coincide: the statistic is
        # identically zero and anything below the clamp is rounding dust,
        # which must not flip the point-mass p-value from 1 to 0.
        t = 0.0
    warns = []
    if plugin:
        warns.append(_PLUGIN_NOTE)
    if isinstance(dist, (ChiSqApprox, ChiSqMix)):
        warns.append(_ASYMPTOTIC_NOTE)
    return TestResult(statistic=t, dist=dist, p_value=pvalue(dist, t),
                      fit_null=fit_null, fit_alt=fit_alt, test_id=test_id,
                      warnings=tuple(warns))


def _norm_cov(cov):
    if isinstance(cov, str):
        if cov != "estimate":
            raise ValueError("cov must be a CovParams, None, or 'estimate'")
        return None
    return cov


def _use_cov(fit_null, cov):
    """Covariance plugged into a statistic: known, or the null fit's estimates."""
    if cov is not None:
        return cov, False
    return CovParams(fit_null.sigma2_hat, fit_null.tau_hat), True


def test_point_unrestricted(S, M0, cov=None):
    """Mean equals M0 vs. unrestricted (a0).

    Known covariance: exact chi-square(q). Estimated covariance: the
    scaled ratio of the lack of fit to the within-sample dispersion with
    an F(q, q(n-1)) reference, requiring n >= 2.
    """
    cov = _norm_cov(cov)
    S = np.asarray(S, dtype=float)
    n, p = S.shape[0], S.shape[1]
    q = sym_dim(p)
    M0 = check_symmetric(M0, "M0")
    if cov is None and n < 2:
        raise ValueError("the F variant requires n >= 2")
    ybar = sample_mean(S)
    fit_null = mle(Point(M0), S, cov)
    fit_alt = mle(Unrestricted(), S, cov)
    if cov is not None:
        t = n * norm_sq(ybar - M0, cov)
        return _result("a0", t, ChiSq(q), fit_null, fit_alt, False)
    tau = fit_null.tau_hat
    unit = CovParams(1.0, tau)
    s2 = estimate_sigma2(S, ybar, tau)  # within-sample dispersion only
    t = (n - 1.0) * norm_sq(ybar - M0, unit) / (q * s2)
    return _result("a0", t, FDist(q, q * (n - 1.0)), fit_null, fit_alt, True)


def test_A1(S, U0, M0, cov=None):
    """Mean equals M0 within the family diagonalized by U0 (a1).

    M0 must itself be diagonalized by U0. Exact chi-square(p) given the
    covariance; plug-in asymptotic otherwise.
    """
    cov = _norm_cov(cov)
    S = np.asarray(S, dtype=float)
    n, p = S.shape[0], S.shape[1]
    M0 = check_symmetric(M0, "M0")
    fit_null = mle(Point(M0), S, cov)
    fit_alt = mle(FixedEigvecs(U0), S, cov)
    U0 = fit_alt.set.U0
    W0 = U0.T @ M0 @ U0
    d0 = np.diagonal(W0).copy()
    if np.abs(W0 - np.diag(d0)).max() > 1e-8 * max(1.0, np.abs(M0).max()):
        raise ValueError("M0 is not diagonalized by U0")
    use_cov, plugin = _use_cov(fit_null, cov)
    d_hat = np.diagonal(U0.T @ sample_mean(S) @ U0)
    t = n * norm_sq(np.diag(d_hat - d0), use_cov)
    dist = ChiSqApprox(p) if plugin else ChiSq(p)
    return _result("a1", t, dist, fit_null, fit_alt, plugin)


def test_A2(S, U0, cov=None):
    """Mean is diagonalized by U0 vs. unrestricted (a2)."""
    cov = _norm_cov(cov)
    S = np.asarray(S, dtype=float)
    n, p = S.shape[0], S.shape[1]
    q = sym_dim(p)
    fit_null = mle(FixedEigvecs(U0), S, cov)
    fit_alt = mle(Unrestricted(), S, cov)
    use_cov, plugin = _use_cov(fit_null, cov)
    t = n * norm_sq(sample_mean(S) - fit_null.M_hat, use_cov)
    dist = ChiSqApprox(q - p) if plugin else ChiSq(q - p)
    return _result("a2", t, dist, fit_null, fit_alt, plugin)


def _separated_spectrum(mult):
    # a spectrum with the given tie pattern and block gaps so large that
    # unit-variance noise never pools across blocks: the mixture weights
    # depend only on the local cone angles, hence only on the tie pattern
    values = []
    for j, m in enumerate(mult.m):
        values.extend([-1e6 * j] * m)
    return np.asarray(values, dtype=float)


def test_C2(S, U0, mult=None, cov=None, weights=None, weight_reps=100000,
            seed=0):
    """Mean lies in the ordered-eigenvalue cone of U0 vs. unrestricted (c2).

    The reference is a chi-square mixture over the faces of the cone at
    the true spectrum. Pass precomputed ConeWeights as `weights`, or the
    tie pattern `mult` of the true spectrum: the weights are then
    simulated with widely separated blocks (only the local cone angles
    matter) using `weight_reps` replicates of `seed`.
    """
    cov = _norm_cov(cov)
    S = np.asarray(S, dtype=float)
    n, p = S.shape[0], S.shape[1]
    q = sym_dim(p)
    if weights is None:
        if mult is None:
            raise ValueError(
                "supply cone weights or the tie pattern mult of the true spectrum")
        from .calibrate import estimate_cone_weights
        weights = estimate_cone_weights(_separated_spectrum(mult), weight_reps,
                                        seed)
        # Faces below the pattern's block count are unreachable in the limit
        # (pooling across separated blocks has vanishing probability), so the
        # mixture keeps the p - k + 1 faces k..p.
        keep = [i for i, kdim in enumerate(weights.face_dims) if kdim >= mult.k]
        wsum = sum(weights.weights[i] for i in keep)
        mix_w = tuple(weights.weights[i] / wsum for i in keep)
        mix_dims = tuple(weights.face_dims[i] for i in keep)
    else:
        mix_w = tuple(weights.weights)
        mix_dims = tuple(weights.face_dims)
    fit_null = mle(OrderedCone(U0), S, cov)
    fit_alt = mle(Unrestricted(), S, cov)
    dist = ChiSqMix(weights=mix_w, dfs=tuple(q - k for k in mix_dims))
    use_cov, plugin = _use_cov(fit_null, cov)
    t = n * norm_sq(sample_mean(S) - fit_null.M_hat, use_cov)
    return _result("c2", t, dist, fit_null, fit_alt, plugin)


def test_S1(S, M0, D0, mult, cov=None):
    """Mean equals M0 vs. free eigenvectors with known spectrum D0 (s1).

    The statistic contains no tau and needs only sigma2; it vanishes when
    the sample mean's eigenvectors line up with M0's.
    """
    cov = _norm_cov(cov)
    S = np.asarray(S, dtype=float)
    n = S.shape[0]
    q = sym_dim(S.shape[1])
    M0 = check_symmetric(M0, "M0")
    D0 = np.asarray(D0, dtype=float)
    if np.abs(eigh_desc(M0).lam - D0).max() > 1e-8 * max(1.0, np.abs(D0).max()):
        raise ValueError("M0 does not have spectrum D0")
    fit_null = mle(Point(M0), S, cov)
    fit_alt = mle(FixedEigvals(D0, mult), S, cov)
    use_cov, plugin = _use_cov(fit_null, cov)
    ybar = sample_mean(S)
    lam = eigh_desc(ybar).lam
    t = (2.0 * n / use_cov.sigma2) * (lam @ D0 - np.sum(ybar * M0))
    df = q - sum(m * (m + 1) for m in mult.m) / 2.0
    return _result("s1", t, ChiSqApprox(df), fit_null, fit_alt, plugin)


def test_S2(S, D0, mult, cov=None):
    """Spectrum equals D0 (eigenvectors free) vs. unrestricted (s2)."""
    cov = _norm_cov(cov)
    S = np.asarray(S, dtype=float)
    n = S.shape[0]
    D0 = np.asarray(D0, dtype=float)
    fit_null = mle(FixedEigvals(D0, mult), S, cov)
    fit_alt = mle(Unrestricted(), S, cov)
    use_cov, plugin = _use_cov(fit_null, cov)
    lam = eigh_desc(sample_mean(S)).lam
    t = n * norm_sq(np.diag(lam - D0), use_cov)
    df = sum(m * (m + 1) for m in mult.m) / 2.0
    return _result("s2", t, ChiSqApprox(df), fit_null, fit_alt, plugin)


def test_S3(S, mult, cov=None):
    """Spectrum has multiplicity pattern mult vs. unrestricted (s3).

    tau-free: the statistic is the eigenvalue dispersion about the block
    averages, scaled by sigma2.
    """
    cov = _norm_cov(cov)
    S = np.asarray(S, dtype=float)
    n = S.shape[0]
    fit_null = mle(Mult(mult), S, cov)
    fit_alt = mle(Unrestricted(), S, cov)
    use_cov, plugin = _use_cov(fit_null, cov)
    lam = eigh_desc(sample_mean(S)).lam
    resid = lam - block_average(lam, mult)
    t = n / use_cov.sigma2 * np.sum(resid ** 2)
    df = sum(m * (m + 1) for m in mult.m) / 2.0 - mult.k
    return _result("s3", t, ChiSqApprox(df), fit_null, fit_alt, plugin)


def test_sigma_structure(S):
    """Covariance is orthogonally invariant vs. unrestricted (cov-check).

    Compares the two-parameter (sigma2, tau) fit against the free
    covariance MLE of the embedded vectors; requires n > q(q+3)/2 so the
    latter is comfortably nonsingular. The chi-square calibration is
    claimed only when the fitted tau is positive and away from zero; a
    warning is attached otherwise.
    """
    S = np.asarray(S, dtype=float)
    n, p = S.shape[0], S.shape[1]
    q = sym_dim(p)
    min_n = q * (q + 3) // 2
    if n <= min_n:
        raise ValueError("need n > q(q+3)/2 = %d observations, got %d" % (min_n, n))
    fit_null = mle(Unrestricted(), S)
    sigma_hat = empirical_sigma(S)
    sign, logdet = np.linalg.slogdet(sigma_hat)
    if sign <= 0.0:
        raise ValueError("empirical covariance of the embedded sample is singular")
    t = (n * q * math.log(fit_null.sigma2_hat)
         - n * math.log1p(-p * fit_null.tau_hat)
         - n * logdet)
    df = q * (q + 1) / 2.0 - 2.0
    res = _result("cov-check", t, ChiSqApprox(df), fit_null, None, False)
    if fit_null.tau_hat <= 0.0:
        res.warnings = res.warnings + (
            "fitted tau is nonpositive: the chi-square calibration is not "
            "guaranteed in this regime",)
    return res


def test2_equal_unrestricted(S, n1, cov=None):
    """Two-sample equal means vs. unrestricted (2a0).

    Known covariance: exact chi-square(q). Estimated: F(q, q(n-2))
    variant built from the pooled dispersion, requiring n >= 3.
    """
    cov = _norm_cov(cov)
    S = np.asarray(S, dtype=float)
    n, p = S.shape[0], S.shape[1]
    n2 = n - n1
    q = sym_dim(p)
    if cov is None and n < 3:
        raise ValueError("the F variant requires n >= 3")
    ybar1, ybar2, _ = group_means(S, n1)
    fit_null = mle2(EqualMeans(), S, n1, cov)
    fit_alt = mle2(Unrestricted2(), S, n1, cov)
    if cov is not None:
        t = (n1 * n2 / n) * norm_sq(ybar1 - ybar2, cov)
        return _result("2a0", t, ChiSq(q), fit_null, fit_alt, False)
    tau = fit_null.tau_hat
    unit = CovParams(1.0, tau)
    s12 = pooled_sigma2(S, n1, ybar1, ybar2, tau)  # pooled dispersion only
    t = (n - 2.0) * n1 * n2 * norm_sq(ybar1 - ybar2, unit) / (q * n * n * s12)
    return _result("2a0", t, FDist(q, q * (n - 2.0)), fit_null, fit_alt, True)


def test2_S1(S, n1, mult, cov=None):
    """Two samples share one spectrum with pattern mult vs. unrestricted (2s1)."""
    cov = _norm_cov(cov)
    S = np.asarray(S, dtype=float)
    n = S.shape[0]
    n2 = n - n1
    ybar1, ybar2, _ = group_means(S, n1)
    fit_null = mle2(CommonEigvals(mult), S, n1, cov)
    fit_alt = mle2(Unrestricted2(), S, n1, cov)
    use_cov, plugin = _use_cov(fit_null, cov)
    lam1 = eigh_desc(ybar1).lam
    lam2 = eigh_desc(ybar2).lam
    lam_bar = (n1 * lam1 + n2 * lam2) / n
    resid = lam_bar - block_average(lam_bar, mult)
    t = ((n1 * n2 / n) * norm_sq(np.diag(lam1 - lam2), use_cov)
         + n / use_cov.sigma2 * np.sum(resid ** 2))
    df = sum(m * (m + 1) for m in mult.m) - mult.k
    return _result("2s1", t, ChiSqApprox(df), fit_null, fit_alt, plugin)


def test2_S2(S, n1, mult, cov=None):
    """Two-sample equal means given a shared spectrum pattern (2s2).

    The null pools the data into one sample carrying the multiplicity
    pattern; the alternative allows each group its own eigenvectors
    around a common spectrum.
    """
    cov = _norm_cov(cov)
    S = np.asarray(S, dtype=float)
    n = S.shape[0]
    n2 = n - n1
    q = sym_dim(S.shape[1])
    ybar1, ybar2, avg = group_means(S, n1)
    dec = eigh_desc(avg)
    m0 = (dec.V * block_average(dec.lam, mult)) @ dec.V.T
    fit_alt = mle2(CommonEigvals(mult), S, n1, cov)
    if cov is not None:
        use_cov, plugin = cov, False
        sigma2_hat, tau_hat = cov.sigma2, cov.tau
    else:
        tau_hat = pooled_tau(S, n1, m0, m0)
        sigma2_hat = pooled_sigma2(S, n1, m0, m0, tau_hat)
        use_cov, plugin = CovParams(sigma2_hat, tau_hat), True
    fit_null = FitResult2(M1_hat=m0, M2_hat=m0, sigma2_hat=sigma2_hat,
                          tau_hat=tau_hat, set=EqualMeans())
    lam1 = eigh_desc(ybar1).lam
    lam2 = eigh_desc(ybar2).lam
    lam_bar = (n1 * lam1 + n2 * lam2) / n
    r_pool = dec.lam - block_average(dec.lam, mult)
    r_bar = lam_bar - block_average(lam_bar, mult)
    t = (2.0 * n1 * n2 / (n * use_cov.sigma2)
         * (lam1 @ lam2 - np.sum(ybar1 * ybar2))
         + n / use_cov.sigma2 * (np.sum(r_pool ** 2) - np.sum(r_bar ** 2)))
    df = q - sum(m * (m + 1) for m in mult.m) / 2.0
    return _result("2s2", t, ChiSqApprox(df), fit_null, fit_alt, plugin)


def _cov_from_config(spec):
    if spec is None or spec.get("estimate"):
        return None
    known = spec["known"]
    return CovParams(float(known["sigma2"]), float(known["tau"]))


def run_config(config, S, n1=None):
    """Run the test described by a hypothesis-config mapping on a sample.

    The mapping mirrors the CLI JSON format: a `test_id`, the set
    parameters as nested arrays (`M0`, `U0`, `D0`, `multiplicities`),
    and `cov` as {"known": {"sigma2": x, "tau": y}} or {"estimate": true}.
    Two-sample tests take the group-1 count n1.
    """
    test_id = config["test_id"]
    cov = _cov_from_config(config.get("cov"))
    S = np.asarray(S, dtype=float)

    def arr(key):
        if key not in config:
            raise KeyError("config for %r requires %r" % (test_id, key))
        return np.asarray(config[key], dtype=float)

    def mult():
        if "multiplicities" not in config:
            raise KeyError("config for %r requires 'multiplicities'" % test_id)
        return Multiplicities(tuple(int(v) for v in config["multiplicities"]))

    if test_id.startswith("2") and n1 is None:
        raise ValueError("test %r needs a two-group sample" % test_id)
    if test_id == "a0":
        return test_point_unrestricted(S, arr("M0"), cov)
    if test_id == "a1":
        return test_A1(S, arr("U0"), arr("M0"), cov)
    if test_id == "a2":
        return test_A2(S, arr("U0"), cov)
    if test_id == "c2":
        weights = None
        if "weights" in config:
            from .calibrate import ConeWeights
            w = config["weights"]
            weights = ConeWeights(d_true=None,
                                  face_dims=tuple(int(k) for k in w["face_dims"]),
                                  weights=tuple(float(x) for x in w["weights"]),
                                  reps=0)
        return test_C2(
            S, arr("U0"),
            mult=mult() if "multiplicities" in config else None,
            cov=cov, weights=weights,
            weight_reps=int(config.get("reps", 100000)),
            seed=int(config.get("seed", 0)))
    if test_id == "s1":
        return test_S1(S, arr("M0"), arr("D0"), mult(), cov)
    if test_id == "s2":
        return test_S2(S, arr("D0"), mult(), cov)
    if test_id == "s3":
        return test_S3(S, mult(), cov)
    if test_id == "cov-check":
        return test_sigma_structure(S)
    if test_id == "2a0":
        return test2_equal_unrestricted(S, n1, cov)
    if test_id == "2s1":
        return test2_S1(S, n1, mult(), cov)
    if test_id == "2s2":
        return test2_S2(S, n1, mult(), cov)
    raise ValueError("unknown test_id %r" % test_id)
