"""The orthogonally invariant symmetric-matrix-variate normal distribution.

A random symmetric Y ~ N(M, sigma2, tau) has density proportional to
exp(-0.5 * ||Y - M||^2_{sigma2,tau}). In vecd coordinates its covariance
is block diagonal: sigma2 * (I_p + c 11') over the diagonal entries, with
c = tau / (1 - p*tau), and sigma2 * I over the scaled off-diagonal
entries. This module builds that covariance explicitly, evaluates the
log-density, draws exact samples over the whole parameter range
(tau < 1/p, both signs of c), and computes the empirical vecd covariance
used by the covariance-structure check.

Samples are stored as (n, p, p) arrays of symmetric matrices.
"""

import math

import numpy as np

from .symcore import SQRT2, check_symmetric, norm_sq, sym_dim


def _rng_from(seed):
    # Philox is counter-based: independent child streams spawned from a
    # SeedSequence are reproducible regardless of draw or worker order.
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.Philox(seed))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def build_sigma(p, cov):
    """Explicit q x q covariance of vecd(Y) for the invariant model.

    Top-left p x p block: sigma2 * (I_p + c 11'). Bottom-right block:
    sigma2 * I_{q-p} (the sqrt(2) scaling of vecd doubles the raw
    off-diagonal variance sigma2/2). Positive definite on the allowed
    parameter range sigma2 > 0, c > -1/p.
    """
    cov.validate(p)
    q = sym_dim(p)
    c = cov.c(p)
    sigma = np.eye(q)
    sigma[:p, :p] += c
    return cov.sigma2 * sigma


def log_density(Y, M, cov):
    """Log of the N(M, sigma2, tau) density at Y."""
    Y = np.asarray(Y, dtype=float)
    M = np.asarray(M, dtype=float)
    p = Y.shape[0]
    cov.validate(p)
    q = sym_dim(p)
    return (0.5 * math.log1p(-p * cov.tau)
            - 0.5 * q * math.log(2.0 * math.pi)
            - 0.5 * q * math.log(cov.sigma2)
            - 0.5 * norm_sq(Y - M, cov))


def _assemble(diag, off, p):
    n = diag.shape[0]
    out = np.zeros((n, p, p))
    idx = np.arange(p)
    out[:, idx, idx] = diag
    iu = np.triu_indices(p, 1)
    out[:, iu[0], iu[1]] = off
    out[:, iu[1], iu[0]] = off
    return out


def sample(n, M, cov, seed):
    """Draw n i.i.d. symmetric matrices from N(M, sigma2, tau).

    `seed` may be an integer, a numpy SeedSequence, or a Generator;
    integers map to a fresh Philox stream, so results are deterministic
    per seed and identical however replicates are distributed across
    workers. Draw order is fixed: the shared scalar (c >= 0 branch only),
    then all diagonal normals, then all off-diagonal normals.

    For c >= 0 the construction is Z = sigma * (sqrt(c) w I_p + W) with
    w standard normal and W from the Gaussian orthogonal ensemble. For
    c < 0 that recipe has no real sqrt(c), so the diagonal is drawn
    through a Cholesky factor of sigma2 * (I_p + c 11') instead, with
    off-diagonals i.i.d. N(0, sigma2/2) as before.
    """
    M = check_symmetric(M, "M")
    p = M.shape[0]
    cov.validate(p)
    if n < 1:
        raise ValueError("need n >= 1, got %d" % n)
    rng = _rng_from(seed)
    q = sym_dim(p)
    c = cov.c(p)
    s = math.sqrt(cov.sigma2)
    if c >= 0.0:
        w = rng.standard_normal(n)
        diag = s * (math.sqrt(c) * w[:, None] + rng.standard_normal((n, p)))
    else:
        L = np.linalg.cholesky(cov.sigma2 * (np.eye(p) + c))
        diag = rng.standard_normal((n, p)) @ L.T
    off = (s / SQRT2) * rng.standard_normal((n, q - p))
    return _assemble(diag, off, p) + M


def vecd_rows(S):
    """vecd applied to each matrix of an (n, p, p) sample, as an (n, q) array."""
    S = np.asarray(S, dtype=float)
    p = S.shape[1]
    iu = np.triu_indices(p, 1)
    return np.concatenate(
        [S[:, np.arange(p), np.arange(p)], SQRT2 * S[:, iu[0], iu[1]]], axis=1)


def empirical_sigma(S):
    """MLE of the vecd covariance: (1/n) sum of outer products of residuals.

    Requires n > q so the estimate is almost surely nonsingular.
    """
    S = np.asarray(S, dtype=float)
    n, p = S.shape[0], S.shape[1]
    q = sym_dim(p)
    if n <= q:
        raise ValueError("need n > q = %d observations, got %d" % (q, n))
    R = vecd_rows(S)
    R = R - R.mean(axis=0)
    return R.T @ R / n


def sample_mean(S):
    """Arithmetic mean of an (n, p, p) sample."""
    S = np.asarray(S, dtype=float)
    if S.ndim != 3 or S.shape[0] < 1:
        raise ValueError("expected a nonempty (n, p, p) sample, got shape %s" % (S.shape,))
    return S.mean(axis=0)


def group_means(S, n1):
    """Group means (Ybar1, Ybar2) and their weighted average for a split sample.

    The first n1 observations form group 1; the weighted average is
    (n1 Ybar1 + n2 Ybar2) / n, which equals the overall mean.
    """
    S = np.asarray(S, dtype=float)
    n = S.shape[0]
    if not 1 <= n1 < n:
        raise ValueError("need 1 <= n1 < n, got n1=%d, n=%d" % (n1, n))
    ybar1 = S[:n1].mean(axis=0)
    ybar2 = S[n1:].mean(axis=0)
    avg = (n1 * ybar1 + (n - n1) * ybar2) / n
    return ybar1, ybar2, avg
