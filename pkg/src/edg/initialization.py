"""Initialization for the descent solvers: one-step spectral initialization,
row-norm trimming, and the resampled multi-round variant.

The one-step initializer hard-thresholds (L/m) R_Omega applied to the data.
The resampled variant splits the sample multiset into S+1 groups, starts from
the first, and refines with one fixed-step projected correction per fresh
group, trimming row norms before each round to keep the iterate incoherent.
"""

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import LinearOperator, eigsh

from .dualbasis import SampleSet, num_pairs
from .geometry import double_center
from .manifold import TangentVector, factor_from_eigs, hard_threshold, retract_structured
from .solvers import _model_pair_values, _pseudo_grad_times_u

#: above this size the one-step eigensolve goes through a matrix-free Lanczos
#: path instead of a dense n x n eigendecomposition
_DENSE_EIG_MAX_N = 400


@dataclass(frozen=True)
class ResampleConfig:
    partitions: int
    nu: float
    rank: int

    def __post_init__(self):
        if self.partitions < 0:
            raise ValueError("partitions must be >= 0")
        if self.nu < 1:
            raise ValueError("nu must be >= 1")
        if self.rank < 1:
            raise ValueError("rank must be >= 1")


def _one_step_factor(b, rows, cols, n, r, scale):
    """H_r(scale * sum_a b_a v_a) = H_r(-(scale/2) J S J) without the truth."""
    if n <= _DENSE_EIG_MAX_N:
        s = np.zeros((n, n))
        np.add.at(s, (rows, cols), b)
        np.add.at(s, (cols, rows), b)
        return hard_threshold(-0.5 * scale * double_center(s), r)
    s = coo_matrix(
        (np.concatenate([b, b]), (np.concatenate([rows, cols]), np.concatenate([cols, rows]))),
        shape=(n, n),
    ).tocsr()

    def matvec(y):
        t = s @ (y - y.mean())
        return -0.5 * scale * (t - t.mean())

    op = LinearOperator((n, n), matvec=matvec, dtype=float)
    v0 = np.random.default_rng(0).standard_normal(n)
    vals, vecs = eigsh(op, k=r, which="LM", v0=v0)
    return factor_from_eigs(vals, vecs)


def init_one_step(measured, n, r):
    """Spectral start X_0 = H_r((L/m) R_Omega(data))."""
    omega = measured.omega
    if omega.n != n:
        raise ValueError("sample set does not match the requested size")
    scale = num_pairs(n) / omega.m
    return _one_step_factor(measured.value_array(), omega.rows, omega.cols, n, r, scale)


def trim_rows(basis, cap):
    """Rescale rows with norm above cap down to cap; zero rows untouched."""
    norms = np.linalg.norm(basis, axis=1)
    scale = np.ones_like(norms)
    over = norms > cap
    scale[over] = cap / norms[over]
    return basis * scale[:, None]


def trim(f, nu, r):
    """Cap basis row norms at sqrt(nu r / n), keeping the spectrum verbatim.

    The capped matrix A diag(d) A^T is re-factored (thin QR plus an r x r
    eigensolve) so the returned basis is orthonormal again; if no row exceeds
    the cap the input factor is returned unchanged.
    """
    if nu < 1:
        raise ValueError("nu must be >= 1")
    cap = np.sqrt(nu * r / f.n)
    if not np.any(np.linalg.norm(f.basis, axis=1) > cap):
        return f
    a = trim_rows(f.basis, cap)
    q, rmat = np.linalg.qr(a)
    small = (rmat * f.spectrum) @ rmat.T
    small = (small + small.T) / 2
    vals, vecs = np.linalg.eigh(small)
    return factor_from_eigs(vals, q @ vecs)


def partition_sample_set(omega, parts):
    """Positional split in draw order; the first m mod parts groups get one
    extra sample."""
    if parts < 1:
        raise ValueError("parts must be >= 1")
    if omega.m < parts:
        raise ValueError("not enough samples to fill every group")
    base, extra = divmod(omega.m, parts)
    out = []
    start = 0
    for g in range(parts):
        size = base + (1 if g < extra else 0)
        sl = slice(start, start + size)
        out.append(SampleSet(np.column_stack([omega.rows[sl], omega.cols[sl]]), omega.n))
        start += size
    return out


def init_resampled(measured, n, cfg):
    """Resampled initialization: spectral start on the first group, then one
    trimmed fixed-step tangent correction per remaining group."""
    omega = measured.omega
    if omega.n != n:
        raise ValueError("sample set does not match the requested size")
    parts = cfg.partitions + 1
    groups = partition_sample_set(omega, parts)
    b = measured.value_array()
    L = num_pairs(n)
    bounds = np.cumsum([0] + [g.m for g in groups])
    z = _one_step_factor(
        b[: bounds[1]], groups[0].rows, groups[0].cols, n, cfg.rank, L / groups[0].m
    )
    for g in range(1, parts):
        zt = trim(z, cfg.nu, cfg.rank)
        rows = groups[g].rows
        cols = groups[g].cols
        bg = b[bounds[g] : bounds[g + 1]]
        model, _ = _model_pair_values(zt.basis, zt.spectrum, rows, cols)
        gu = _pseudo_grad_times_u(bg - model, rows, cols, n, zt.basis)
        core = zt.basis.T @ gu
        core = (core + core.T) / 2
        wing = gu - zt.basis @ core
        step = L / groups[g].m
        z = retract_structured(zt, step, TangentVector(zt, core, wing), cfg.rank)
    return z
