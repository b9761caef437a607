"""Symmetric-matrix primitives shared by every other module.

Matrices are plain (p, p) numpy arrays, kept exactly symmetric by
construction. This module provides the isometric vecd embedding into
R^q with q = p(p+1)/2, the (sigma2, tau) inner product, a Jacobi
eigendecomposition with a canonical ordering and sign convention,
block averaging of eigenvalues, and the eigenvalue-wise matrix
log/exp used for log-domain preprocessing.
"""

import math
from dataclasses import dataclass

import numpy as np

SQRT2 = math.sqrt(2.0)


class ConvergenceError(RuntimeError):
    """Jacobi sweeps failed to reduce the off-diagonal below tolerance."""


def sym_dim(p):
    """Number of free entries q = p(p+1)/2 of a p x p symmetric matrix."""
    return p * (p + 1) // 2


def check_symmetric(X, name="matrix", tol=1e-8):
    """Validate and return X as a float symmetric (p, p) array.

    Symmetry is enforced exactly by averaging with the transpose after
    checking that the asymmetry is below `tol` relative to the scale of X.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError("%s must be square, got shape %s" % (name, (X.shape,)))
    if not np.all(np.isfinite(X)):
        raise ValueError("%s has non-finite entries" % name)
    scale = max(1.0, np.abs(X).max())
    if np.abs(X - X.T).max() > tol * scale:
        raise ValueError("%s is not symmetric" % name)
    return 0.5 * (X + X.T)


@dataclass(frozen=True)
class CovParams:
    """Covariance parameters (sigma2, tau) of the orthogonally invariant model.

    sigma2 is the overall variance scale and tau couples the diagonal
    entries; tau < 1/p is required for a proper distribution. The derived
    parameter c = tau / (1 - p*tau) is the correlation-like coefficient of
    the diagonal block.
    """

    sigma2: float
    tau: float = 0.0

    def c(self, p):
        return self.tau / (1.0 - p * self.tau)

    def validate(self, p):
        if not (self.sigma2 > 0.0 and math.isfinite(self.sigma2)):
            raise ValueError("sigma2 must be positive, got %r" % (self.sigma2,))
        if not (self.tau < 1.0 / p):
            raise ValueError("tau must be < 1/p = %g, got %r" % (1.0 / p, self.tau))
        return self


@dataclass(frozen=True)
class Multiplicities:
    """Ordered multiplicities m_1, ..., m_k of the k distinct eigenvalues.

    The cumulative sums e_0 = 0, e_j = m_1 + ... + m_j delimit the blocks;
    e_k equals the matrix dimension p.
    """

    m: tuple

    def __post_init__(self):
        m = tuple(int(v) for v in self.m)
        if len(m) == 0 or any(v < 1 for v in m):
            raise ValueError("multiplicities must be positive integers, got %r" % (self.m,))
        object.__setattr__(self, "m", m)

    @property
    def k(self):
        return len(self.m)

    @property
    def p(self):
        return sum(self.m)

    @property
    def e(self):
        out = [0]
        for v in self.m:
            out.append(out[-1] + v)
        return tuple(out)

    def blocks(self):
        """Yield (start, stop) index pairs, one per block."""
        e = self.e
        for j in range(self.k):
            yield e[j], e[j + 1]


@dataclass(eq=False)
class EigenDecomp:
    """Eigendecomposition X = V diag(lam) V' with lam non-increasing."""

    V: np.ndarray
    lam: np.ndarray


def vecd(X):
    """Embed a symmetric matrix into R^q: (diagonal, sqrt(2) * upper triangle).

    The sqrt(2) scaling makes the embedding isometric: the squared
    Euclidean length of vecd(X) equals tr(X^2).
    """
    X = np.asarray(X, dtype=float)
    p = X.shape[0]
    iu = np.triu_indices(p, 1)
    return np.concatenate([np.diagonal(X), SQRT2 * X[iu]])


def vecd_inv(v, p):
    """Invert vecd: rebuild the symmetric matrix from its q coordinates."""
    v = np.asarray(v, dtype=float)
    if v.shape != (sym_dim(p),):
        raise ValueError("expected %d coordinates for p=%d, got shape %s"
                         % (sym_dim(p), p, v.shape))
    X = np.zeros((p, p))
    np.fill_diagonal(X, v[:p])
    iu = np.triu_indices(p, 1)
    X[iu] = v[p:] / SQRT2
    X[(iu[1], iu[0])] = X[iu]
    return X


def inner(A, B, cov):
    """Inner product [tr(AB) - tau tr(A) tr(B)] / sigma2 of symmetric A, B."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape:
        raise ValueError("dimension mismatch: %s vs %s" % (A.shape, B.shape))
    # tr(AB) = sum(A * B) because both arguments are symmetric.
    return (np.sum(A * B) - cov.tau * np.trace(A) * np.trace(B)) / cov.sigma2


def norm_sq(A, cov):
    """Squared norm inner(A, A, cov).

    The quadratic form is evaluated for any tau, including tau >= 1/p where
    it is only a pseudo-norm (the shape estimator uses tau = q/p); the
    result is guaranteed nonnegative only for tau < 1/p.
    """
    return inner(A, A, cov)


def _canon_column_signs(V):
    # Flip each column so its largest-magnitude entry is positive; np.argmax
    # returns the smallest row index among ties, which is the tie rule.
    for j in range(V.shape[1]):
        i = int(np.argmax(np.abs(V[:, j])))
        if V[i, j] < 0.0:
            V[:, j] = -V[:, j]
    return V


def eigh_desc(X, max_sweeps=50, tol_factor=1e-13):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Eigenvalues are returned in non-increasing order (stable with respect
    to the rotation output for ties) and each eigenvector's sign is fixed
    so its largest-magnitude entry is positive. Deterministic for
    identical input bits.

    Raises ConvergenceError if the largest off-diagonal magnitude does not
    fall below tol_factor * ||X||_F within max_sweeps sweeps.
    """
    A = check_symmetric(X)
    p = A.shape[0]
    V = np.eye(p)
    tol = tol_factor * np.linalg.norm(A)

    if p > 1:
        for _ in range(max_sweeps):
            iu = np.triu_indices(p, 1)
            if np.abs(A[iu]).max() <= tol:
                break
            for i in range(p - 1):
                for j in range(i + 1, p):
                    aij = A[i, j]
                    if aij == 0.0:
                        continue
                    theta = (A[j, j] - A[i, i]) / (2.0 * aij)
                    if theta >= 0.0:
                        t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
                    else:
                        t = 1.0 / (theta - math.sqrt(theta * theta + 1.0))
                    co = 1.0 / math.sqrt(t * t + 1.0)
                    si = t * co
                    Ai = A[i].copy()
                    Aj = A[j].copy()
                    A[i] = co * Ai - si * Aj
                    A[j] = si * Ai + co * Aj
                    Aci = A[:, i].copy()
                    Acj = A[:, j].copy()
                    A[:, i] = co * Aci - si * Acj
                    A[:, j] = si * Aci + co * Acj
                    A[i, j] = A[j, i] = 0.0
                    Vi = V[:, i].copy()
                    Vj = V[:, j].copy()
                    V[:, i] = co * Vi - si * Vj
                    V[:, j] = si * Vi + co * Vj
        else:
            raise ConvergenceError(
                "Jacobi did not converge in %d sweeps (off-diagonal %.3e > %.3e)"
                % (max_sweeps, np.abs(A[np.triu_indices(p, 1)]).max(), tol))

    lam = np.diagonal(A).copy()
    order = np.argsort(-lam, kind="stable")
    return EigenDecomp(V=_canon_column_signs(V[:, order]), lam=lam[order])


def block_average(lam, mult):
    """Replace the eigenvalues in each multiplicity block by the block mean."""
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (mult.p,):
        raise ValueError("expected %d eigenvalues for multiplicities %r, got shape %s"
                         % (mult.p, mult.m, lam.shape))
    out = np.empty_like(lam)
    for lo, hi in mult.blocks():
        out[lo:hi] = lam[lo:hi].mean()
    return out


def matrix_log(X):
    """Matrix logarithm: log of the eigenvalues, eigenvectors kept intact.

    Requires X to be positive definite.
    """
    dec = eigh_desc(X)
    if dec.lam[-1] <= 0.0:
        raise ValueError("matrix_log requires positive eigenvalues, smallest is %g"
                         % dec.lam[-1])
    return (dec.V * np.log(dec.lam)) @ dec.V.T


def matrix_exp(X):
    """Matrix exponential: exp of the eigenvalues, eigenvectors kept intact."""
    dec = eigh_desc(X)
    return (dec.V * np.exp(dec.lam)) @ dec.V.T
