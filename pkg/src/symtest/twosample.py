"""Maximum-likelihood estimation for two independent samples.

The mean pair (M1, M2) ranges over one of three closed-form sets:

- Unrestricted2: both means free.
- EqualMeans: M1 = M2.
- CommonEigvals(mult): both means share one unspecified spectrum with
  the given multiplicity pattern, eigenvectors free per group.

Both groups share the covariance (sigma2, tau). The pooled estimators
center each group at its own mean for the dispersion and at the weighted
average of the group means for the shape parameter.

A sample is one (n, p, p) array whose first n1 rows are group 1.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .symcore import Multiplicities, block_average, eigh_desc, sym_dim
from .matnormal import group_means


class ParamSet2:
    """Base tag for the two-sample parameter sets."""


@dataclass(frozen=True, eq=False)
class Unrestricted2(ParamSet2):
    pass


@dataclass(frozen=True, eq=False)
class EqualMeans(ParamSet2):
    pass


@dataclass(frozen=True, eq=False)
class CommonEigvals(ParamSet2):
    mult: Multiplicities


@dataclass(eq=False)
class FitResult2:
    M1_hat: np.ndarray
    M2_hat: np.ndarray
    sigma2_hat: float
    tau_hat: float
    set: ParamSet2


def mle_common_eigvals(mult, Ybar1, Ybar2, n1, n2):
    """Projection of the group means onto the common-spectrum set.

    Each group keeps its own descending eigenvectors; the shared spectrum
    is the block average of the weighted eigenvalue mean
    (n1 L1 + n2 L2) / (n1 + n2).
    """
    dec1 = eigh_desc(Ybar1)
    dec2 = eigh_desc(Ybar2)
    lam_bar = (n1 * dec1.lam + n2 * dec2.lam) / (n1 + n2)
    d = block_average(lam_bar, mult)
    return (dec1.V * d) @ dec1.V.T, (dec2.V * d) @ dec2.V.T


def _group_residual_sums(S, n1, tau):
    # Per-group sums of ||Y_i - Ybar_g||^2_{1,tau}, centered at each group's
    # own mean.
    S = np.asarray(S, dtype=float)
    total = 0.0
    for part in (S[:n1], S[n1:]):
        R = part - part.mean(axis=0)
        traces = np.trace(R, axis1=1, axis2=2)
        total += np.sum(np.sum(R * R, axis=(1, 2)) - tau * traces ** 2)
    return total


def pooled_sigma2(S, n1, M1_hat, M2_hat, tau):
    """Two-sample MLE of sigma2 given the fitted means and tau.

    Pooled within-group dispersion plus the group lack-of-fit terms
    weighted by the group sizes.
    """
    S = np.asarray(S, dtype=float)
    n, p = S.shape[0], S.shape[1]
    q = sym_dim(p)
    if not tau < 1.0 / p:
        raise ValueError("tau must be < 1/p")
    ybar1, ybar2, _ = group_means(S, n1)
    n2 = n - n1
    s12 = _group_residual_sums(S, n1, tau) / (q * n)
    lack = 0.0
    for w, ybar, m_hat in ((n1, ybar1, M1_hat), (n2, ybar2, M2_hat)):
        r = ybar - m_hat
        lack += w * (np.sum(r * r) - tau * np.trace(r) ** 2)
    out = s12 + lack / (q * n)
    if out <= 0.0:
        warnings.warn("degenerate variance estimate (sigma2_hat = %g)" % out)
    return out


def pooled_tau(S, n1, M1_hat, M2_hat):
    """Two-sample MLE of tau given the fitted means.

    Residuals of the observations are centered at the weighted average of
    the group means; the lack-of-fit terms are weighted n1 and n2.
    """
    S = np.asarray(S, dtype=float)
    n, p = S.shape[0], S.shape[1]
    if p < 2:
        raise ValueError("tau estimation requires p >= 2")
    q = sym_dim(p)
    ybar1, ybar2, avg = group_means(S, n1)
    n2 = n - n1
    R = S - avg
    traces = np.trace(R, axis1=1, axis2=2)
    num = np.sum(np.sum(R * R, axis=(1, 2)) - (q / p) * traces ** 2)
    den = np.sum(traces ** 2)
    for w, ybar, m_hat in ((n1, ybar1, M1_hat), (n2, ybar2, M2_hat)):
        r = ybar - m_hat
        tr_r = np.trace(r)
        num += w * (np.sum(r * r) - (q / p) * tr_r ** 2)
        den += w * tr_r ** 2
    den *= q - 1.0
    if den == 0.0:
        raise ValueError("tau estimate undefined: all residual traces vanish")
    return -num / den


def mle2(pset, S, n1, cov=None):
    """MLE of (M1, M2, sigma2, tau) over the given two-sample set.

    The mean fits minimize n1 tr[(Ybar1 - M1)^2] + n2 tr[(Ybar2 - M2)^2]
    over the set. With cov given, the known (sigma2, tau) are recorded
    instead of the pooled estimates.
    """
    S = np.asarray(S, dtype=float)
    ybar1, ybar2, avg = group_means(S, n1)
    n2 = S.shape[0] - n1
    if isinstance(pset, Unrestricted2):
        m1_hat, m2_hat = ybar1, ybar2
    elif isinstance(pset, EqualMeans):
        m1_hat = m2_hat = avg
    elif isinstance(pset, CommonEigvals):
        m1_hat, m2_hat = mle_common_eigvals(pset.mult, ybar1, ybar2, n1, n2)
    else:
        raise TypeError("unknown parameter set %r" % (pset,))
    if cov is not None:
        sigma2_hat, tau_hat = cov.sigma2, cov.tau
    else:
        tau_hat = pooled_tau(S, n1, m1_hat, m2_hat)
        sigma2_hat = pooled_sigma2(S, n1, m1_hat, m2_hat, tau_hat)
    return FitResult2(M1_hat=m1_hat, M2_hat=m2_hat, sigma2_hat=sigma2_hat,
                      tau_hat=tau_hat, set=pset)


def contains2(pset, M1, M2, tol=1e-9):
    """Membership predicate for the two-sample sets."""
    M1 = np.asarray(M1, dtype=float)
    M2 = np.asarray(M2, dtype=float)
    scale = max(1.0, np.abs(M1).max(), np.abs(M2).max())
    if isinstance(pset, Unrestricted2):
        return True
    if isinstance(pset, EqualMeans):
        return np.abs(M1 - M2).max() <= tol * scale
    if isinstance(pset, CommonEigvals):
        lam1 = eigh_desc(M1).lam
        lam2 = eigh_desc(M2).lam
        if np.abs(lam1 - lam2).max() > tol * scale:
            return False
        pat = block_average(lam1, pset.mult)
        return np.abs(lam1 - pat).max() <= tol * scale
    raise TypeError("unknown parameter set %r" % (pset,))
