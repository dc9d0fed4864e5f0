"""Scikit-learn style front end for distance-matrix completion."""

import numpy as np
from sklearn.base import BaseEstimator

from .dualbasis import SampleSet
from .initialization import ResampleConfig, init_one_step, init_resampled
from .solvers import FRAME, PSEUDO, Measurement, SolverConfig, run_to_points, solve

_ALGORITHMS = {"frame": FRAME, "pseudo": PSEUDO}
_INITS = ("onestep", "resample")


def _validate_squared_distances(x):
    """Checked (matrix, mask) for an n-by-n partial squared distance input.

    Unobserved entries are NaN. The observation mask and the observed values
    must both be symmetric, observed off-diagonal values nonnegative, and any
    observed diagonal entry zero.
    """
    d = np.asarray(x, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError("expected a square matrix of squared distances")
    n = d.shape[0]
    if n < 2:
        raise ValueError("need at least two points")
    mask = np.isfinite(d)
    if not np.array_equal(mask, mask.T):
        raise ValueError("observation mask must be symmetric")
    observed = d[mask]
    scale = max(1.0, float(np.abs(observed).max())) if observed.size else 1.0
    if np.abs(observed - d.T[mask]).max(initial=0.0) > 1e-8 * scale:
        raise ValueError("observed distances must be symmetric")
    diag = np.diag(d)
    diag_seen = np.isfinite(diag)
    if np.abs(diag[diag_seen]).max(initial=0.0) > 1e-10 * scale:
        raise ValueError("squared distances must vanish on the diagonal")
    off = mask.copy()
    np.fill_diagonal(off, False)
    if np.any(d[off] < 0):
        raise ValueError("squared distances must be nonnegative")
    return d, mask


class EDGCompletion(BaseEstimator):
    """Embed points from a partially observed squared distance matrix.

    ``fit`` takes an n-by-n matrix whose entry (i, j) is the squared distance
    between points i and j, with NaN marking unobserved entries, and recovers
    an n-by-rank point configuration by descent over rank-constrained Gram
    matrices.

    :param rank: embedding dimension of the recovered configuration.
    :param algorithm: "frame" (adaptive-step descent on the frame residual)
        or "pseudo" (descent along the sampled correction).
    :param rel_tol: relative Frobenius change between iterates that counts
        as converged.
    :param max_iters: iteration budget.
    :param init: "onestep" spectral start or "resample" for the trimmed
        multi-round variant.
    :param partitions: resampling rounds when ``init="resample"``.
    :param nu: coherence cap handed to the trimmed initializer.

    Attributes after ``fit``: ``embedding_`` (n, rank), ``gram_`` (n, n),
    ``report_`` (solver trace), ``n_iter_``.
    """

    def __init__(
        self,
        rank=3,
        algorithm="frame",
        rel_tol=1e-5,
        max_iters=1000,
        init="onestep",
        partitions=2,
        nu=2.0,
    ):
        self.rank = rank
        self.algorithm = algorithm
        self.rel_tol = rel_tol
        self.max_iters = max_iters
        self.init = init
        self.partitions = partitions
        self.nu = nu

    def _measurement(self, x):
        d, mask = _validate_squared_distances(x)
        n = d.shape[0]
        iu = np.triu_indices(n, 1)
        sel = mask[iu]
        if not np.any(sel):
            raise ValueError("no observed off-diagonal entries")
        rows, cols = iu[0][sel], iu[1][sel]
        omega = SampleSet(np.column_stack([rows, cols]), n)
        values = {
            (int(i), int(j)): float(d[i, j]) for i, j in zip(rows, cols)
        }
        return Measurement(omega, values), n

    def fit(self, X, y=None):
        """Recover the configuration; returns self."""
        if self.algorithm not in _ALGORITHMS:
            raise ValueError(f"algorithm must be one of {sorted(_ALGORITHMS)}")
        if self.init not in _INITS:
            raise ValueError(f"init must be one of {_INITS}")
        measured, n = self._measurement(X)
        if not 1 <= self.rank < n:
            raise ValueError("rank must lie in [1, n)")
        cfg = SolverConfig(
            rank=self.rank,
            variant=_ALGORITHMS[self.algorithm],
            rel_tol=self.rel_tol,
            max_iters=self.max_iters,
        )
        if self.init == "onestep":
            x0 = init_one_step(measured, n, self.rank)
        else:
            x0 = init_resampled(
                measured, n, ResampleConfig(self.partitions, self.nu, self.rank)
            )
        factor, report = solve(measured, cfg, x0)
        self.gram_ = factor.densify()
        self.embedding_ = run_to_points(factor, self.rank).T
        self.report_ = report
        self.n_iter_ = report.iterations
        self.n_features_in_ = n
        return self

    def fit_transform(self, X, y=None):
        """Fit and return the (n, rank) embedding."""
        return self.fit(X).embedding_
