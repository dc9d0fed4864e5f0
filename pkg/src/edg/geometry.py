"""Point configurations, Gram/squared-distance conversions, classical MDS,
Procrustes alignment and recovery error metrics.

Conventions: a point configuration is an (r, n) array whose columns are the
points; Gram and squared-distance matrices are (n, n). Centered means the
coordinate-wise mean over points is zero, equivalently X @ 1 = 0 for the Gram
matrix.
"""

import warnings

import numpy as np


class NonEuclideanWarning(UserWarning):
    """Input admits no exact Euclidean embedding at the requested rank."""


#: relative eigenvalue threshold below which input is flagged non-Euclidean
EUCLIDEAN_EIG_RTOL = 1e-8


def center_points(points):
    """Subtract the mean point so the configuration sums to zero."""
    points = np.asarray(points, dtype=float)
    return points - points.mean(axis=1, keepdims=True)


def gram_from_points(points):
    """Gram matrix X = P^T P of a (centered) configuration.

    Parameters
    ----------
    points : ndarray of shape (r, n)
        Columns are points. Centered first if not already.

    Returns
    -------
    ndarray of shape (n, n)
        Symmetric positive semi-definite matrix with zero row sums.
    """
    p = center_points(points)
    x = p.T @ p
    return (x + x.T) / 2


def dist_from_gram(x):
    """Squared distance matrix D_ij = X_ii + X_jj - 2 X_ij.

    Hollow and symmetric by construction.
    """
    x = np.asarray(x, dtype=float)
    g = np.diag(x)
    d = g[:, None] + g[None, :] - 2 * x
    np.fill_diagonal(d, 0.0)
    return d


def double_center(a):
    """Conjugate by the centering matrix: J A J with J = I - (1/n) 1 1^T."""
    a = np.asarray(a, dtype=float)
    return a - a.mean(axis=0, keepdims=True) - a.mean(axis=1, keepdims=True) + a.mean()


def gram_from_dist(d):
    """Centered Gram matrix X = -(1/2) J D J from a squared distance matrix.

    Defined for any hollow symmetric input; a non-Euclidean ``d`` simply yields
    an indefinite output (flagged downstream, not rejected here).
    """
    return -0.5 * double_center(d)


def classical_mds(d, r):
    """Embed a squared distance matrix into r dimensions (Torgerson MDS).

    Takes the top-r eigenpairs of ``gram_from_dist(d)``, clamps negative
    eigenvalues at zero, and returns ``diag(sqrt(lam)) @ V.T``. Emits a
    :class:`NonEuclideanWarning` when a retained eigenvalue is negative beyond
    ``EUCLIDEAN_EIG_RTOL`` relative to the largest one.

    Parameters
    ----------
    d : ndarray of shape (n, n)
        Hollow symmetric squared distances.
    r : int
        Embedding dimension, at most n.

    Returns
    -------
    ndarray of shape (r, n)
        Centered point configuration.
    """
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    if not 1 <= r <= n:
        raise ValueError(f"rank {r} out of range for n={n}")
    x = gram_from_dist(d)
    vals, vecs = np.linalg.eigh(x)
    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order[:r]], vecs[:, order[:r]]
    scale = max(vals.max(initial=0.0), 0.0)
    if np.any(vals < -EUCLIDEAN_EIG_RTOL * max(scale, 1e-300)):
        warnings.warn(
            "distance matrix is not Euclidean at rank %d; negative eigenvalues "
            "clamped to zero" % r,
            NonEuclideanWarning,
            stacklevel=2,
        )
    vals = np.clip(vals, 0.0, None)
    return (np.sqrt(vals)[:, None] * vecs.T).reshape(r, n)


def procrustes_align(a, b):
    """Orthogonally align configuration ``a`` onto ``b``.

    Solves min_Q ||Q a - b||_F over the full orthogonal group (reflections
    allowed, since Gram matrices cannot distinguish them).

    Returns
    -------
    aligned : ndarray of shape (r, n)
        Q @ a for the minimizing Q.
    rmse : float
        sqrt((1/n) ||Q a - b||_F^2) at the optimum.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    u, _, vt = np.linalg.svd(b @ a.T)
    q = u @ vt
    aligned = q @ a
    return aligned, float(np.linalg.norm(aligned - b) / np.sqrt(a.shape[1]))


def rmse(a, b):
    """Root mean square error between two aligned configurations."""
    a = np.asarray(a, dtype=float)
    return float(np.linalg.norm(a - np.asarray(b, dtype=float)) / np.sqrt(a.shape[1]))


def relative_gram_error(x_rev, x_true):
    """||X_rev - X_true||_F / ||X_true||_F; raises on a zero ground truth."""
    x_rev = np.asarray(x_rev, dtype=float)
    x_true = np.asarray(x_true, dtype=float)
    denom = np.linalg.norm(x_true)
    if denom == 0.0:
        raise ValueError("ground truth Gram matrix has zero norm")
    return float(np.linalg.norm(x_rev - x_true) / denom)
