"""Fixed-rank symmetric manifold primitives in factored form.

A rank-r iterate is stored as X = U diag(d) U^T with U an n-by-r orthonormal
basis. Tangent vectors at X are kept as a symmetric r-by-r core plus an n-by-r
wing orthogonal to U, so the retraction never materializes an n-by-n matrix.
"""

from dataclasses import dataclass

import numpy as np

_ORTHO_TOL = 1e-8
_RANK_TOL = 1e-12


def _frozen(a):
    out = np.ascontiguousarray(np.array(a, dtype=float))
    out.setflags(write=False)
    return out


def _fix_signs(basis):
    """Make the first nonzero coordinate of each column positive, in place."""
    for k in range(basis.shape[1]):
        col = basis[:, k]
        nz = np.nonzero(np.abs(col) > 1e-12)[0]
        if nz.size and col[nz[0]] < 0:
            basis[:, k] = -col
    return basis


@dataclass(frozen=True)
class LowRankFactor:
    """X = U diag(d) U^T with orthonormal U and |d| non-increasing."""

    basis: np.ndarray
    spectrum: np.ndarray
    rank_deficient: bool = False

    def __post_init__(self):
        basis = _frozen(self.basis)
        spectrum = _frozen(self.spectrum)
        if basis.ndim != 2 or spectrum.ndim != 1 or basis.shape[1] != spectrum.shape[0]:
            raise ValueError("basis must be n x r with a length-r spectrum")
        r = spectrum.shape[0]
        if np.linalg.norm(basis.T @ basis - np.eye(r)) > _ORTHO_TOL:
            raise ValueError("basis columns are not orthonormal")
        mags = np.abs(spectrum)
        if r and np.any(np.diff(mags) > 1e-9 * mags[0]):
            raise ValueError("spectrum must be ordered by decreasing magnitude")
        deficient = self.rank_deficient or bool(np.any(spectrum == 0.0))
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "spectrum", spectrum)
        object.__setattr__(self, "rank_deficient", deficient)

    @property
    def n(self):
        return self.basis.shape[0]

    @property
    def r(self):
        return self.basis.shape[1]

    def densify(self):
        return (self.basis * self.spectrum) @ self.basis.T


@dataclass(frozen=True)
class TangentVector:
    """P_T Y = U core U^T + wing U^T + U wing^T, with wing orthogonal to U."""

    factor: LowRankFactor
    core: np.ndarray
    wing: np.ndarray

    def __post_init__(self):
        core = _frozen(self.core)
        wing = _frozen(self.wing)
        f = self.factor
        if core.shape != (f.r, f.r) or wing.shape != (f.n, f.r):
            raise ValueError("core must be r x r and wing n x r")
        if np.linalg.norm(core - core.T) > _ORTHO_TOL * max(1.0, np.linalg.norm(core)):
            raise ValueError("core must be symmetric")
        overlap = np.linalg.norm(f.basis.T @ wing)
        if overlap > _ORTHO_TOL * max(1.0, np.linalg.norm(wing)):
            raise ValueError("wing columns must be orthogonal to the basis")
        object.__setattr__(self, "core", core)
        object.__setattr__(self, "wing", wing)

    def densify(self):
        u = self.factor.basis
        cross = self.wing @ u.T
        return u @ self.core @ u.T + cross + cross.T

    def norm(self):
        """Frobenius norm; the cross terms are orthogonal so it splits."""
        return float(np.sqrt(np.sum(self.core**2) + 2.0 * np.sum(self.wing**2)))


def project_tangent(f, y):
    """Factored P_T(Y) = P_U Y + Y P_U - P_U Y P_U for symmetric Y."""
    u = f.basis
    yu = y @ u
    core = u.T @ yu
    core = (core + core.T) / 2
    wing = yu - u @ core
    return TangentVector(f, core, wing)


def factor_from_eigs(vals, vecs, r=None):
    """Order eigenpairs by |value| (stable), keep the top r, fix column signs
    and flag rank deficiency at |d_r| <= 1e-12 |d_1|."""
    r = len(vals) if r is None else r
    order = np.argsort(-np.abs(vals), kind="stable")[:r]
    d = np.asarray(vals)[order]
    basis = _fix_signs(np.array(vecs[:, order]))
    deficient = bool(np.abs(d[-1]) <= _RANK_TOL * np.abs(d[0]))
    return LowRankFactor(basis, d, rank_deficient=deficient)


def hard_threshold(y, r):
    """Keep the r largest-|eigenvalue| pairs of a symmetric matrix.

    Ties are broken by the first-encountered order of a stable sort; each
    basis column gets its first nonzero coordinate made positive so repeated
    calls produce identical factors.
    """
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    if not 1 <= r <= n:
        raise ValueError(f"rank must be in [1, {n}]")
    vals, vecs = np.linalg.eigh(y)
    return factor_from_eigs(vals, vecs, r)


def retract_structured(f, step, g, r):
    """H_r(X + step * P_T G) via a thin QR and a 2r-by-2r eigensolve.

    The update lives in span([U Q]) where the wing factors as Q Rmat, so the
    full-size problem reduces to the small core K; cost O(n r^2 + r^3) and
    no n-by-n intermediate. A zero wing gives Rmat = 0 and the arbitrary Q
    never enters the selected eigenvectors.
    """
    if g.factor is not f:
        raise ValueError("tangent vector is not anchored at the given factor")
    k = f.r
    if not 1 <= r <= 2 * k:
        raise ValueError(f"rank must be in [1, {2 * k}]")
    # Re-project before the QR: a wing that has decayed to rounding dust is
    # no longer orthogonal to the basis at its own scale, and Q must stay
    # in the complement for [U Q] to be orthonormal.
    wing = g.wing - f.basis @ (f.basis.T @ g.wing)
    q, rmat = np.linalg.qr(wing)
    kmat = np.zeros((2 * k, 2 * k))
    kmat[:k, :k] = np.diag(f.spectrum) + step * g.core
    kmat[:k, k:] = step * rmat.T
    kmat[k:, :k] = step * rmat
    vals, vecs = np.linalg.eigh(kmat)
    return factor_from_eigs(vals, np.hstack([f.basis, q]) @ vecs, r)


def condition_number(f):
    """kappa = |d_1| / |d_r| of a genuinely rank-r factor."""
    if f.rank_deficient or np.any(f.spectrum == 0.0):
        raise ValueError("condition number undefined for rank-deficient factors")
    mags = np.abs(f.spectrum)
    return float(mags[0] / mags[-1])
