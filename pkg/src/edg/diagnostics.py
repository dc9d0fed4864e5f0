"""Computable stand-ins for the analysis constants.

Coherence of the truth basis, the spikiness ratio, spectral conditioning,
and an empirical deviation-from-isometry estimate for the sampling operator
restricted to the tangent space.
"""

from dataclasses import dataclass

import numpy as np

from .dualbasis import num_pairs, r_omega, r_omega_star
from .geometry import double_center
from .manifold import condition_number

_STAGNATION_RTOL = 1e-6


@dataclass(frozen=True)
class DiagnosticsReport:
    """Snapshot of the measurable problem constants for one instance."""

    nu_hat: float
    mu1_hat: float
    kappa: float
    rip_deviation: float
    rip_samples: int
    power_iters: int

    def __post_init__(self):
        if self.nu_hat < 1.0:
            raise ValueError("nu_hat is clamped at 1 by construction")
        for name in ("mu1_hat", "kappa", "rip_deviation"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be nonnegative")
        if self.rip_samples < 1:
            raise ValueError("rip_samples must be positive")
        if self.power_iters < 10:
            raise ValueError("power_iters must be at least 10")


def coherence_nu(f):
    """Smallest nu satisfying all six basis-alignment bounds, clamped at 1.

    The bounds cap the projections of the unit, distance-frame, and dual
    basis elements onto the column space and onto the tangent space at
    sqrt(nu*r/(128n)), sqrt(nu*r/(8n)) and sqrt(nu*r/(2n)) respectively.
    All six maxima have closed forms in the row Gram matrices of the basis
    and its centered copy, so the evaluation is O(n^2).
    """
    u = f.basis
    n, r = u.shape
    rho = (u**2).sum(axis=1)
    c = u @ u.T
    iu = np.triu_indices(n, 1)

    # ||P_U e_ij||^2 = rho_i; tangent version couples the two rows.
    pu_e = rho.max()
    top = np.partition(rho, n - 2)[-2:]
    pt_e = 1.0 - (1.0 - top[0]) * (1.0 - top[1])

    # w_ij = h h^T with h = e_i - e_j, so both norms reduce to
    # g = ||P_U h||^2.
    g = (rho[:, None] + rho[None, :] - 2.0 * c)[iu]
    pu_w = 2.0 * g.max()
    pt_w = (4.0 * g - g**2).max()

    # v_ij is the symmetrized outer product of the centered coordinate
    # vectors a = J e_i, b = J e_j.
    cu = u - u.mean(axis=0)
    rho_c = (cu**2).sum(axis=1)
    cc = cu @ cu.T
    aa = (n - 1.0) / n
    ab = -1.0 / n
    ri, rj = rho_c[iu[0]], rho_c[iu[1]]
    cij = cc[iu]
    pu_v = (0.25 * (aa * (ri + rj) + 2.0 * ab * cij)).max()
    pt_v = (
        0.5 * (aa * aa + ab * ab)
        - 0.5 * ((aa - ri) * (aa - rj) + (ab - cij) ** 2)
    ).max()

    scaled = (
        128.0 * max(pu_e, pt_e),
        8.0 * max(pu_w, pt_w),
        2.0 * max(pu_v, pt_v),
    )
    return max(1.0, n / r * max(scaled))


def mu1(x, f):
    """Spikiness ratio max|X_ij| * n / (sqrt(r) * |d_1|)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (f.n, f.n):
        raise ValueError("matrix and factor sizes differ")
    top = abs(f.spectrum[0])
    if top == 0.0:
        raise ValueError("spectral norm is zero")
    return np.abs(x).max() * f.n / (np.sqrt(f.r) * top)


def _tangent_apply(u, y):
    yu = y @ u
    return u @ yu.T + yu @ u.T - u @ (u.T @ yu) @ u.T


def rip_deviation(f, omega, power_iters=100):
    """Operator-norm estimate of (L/m) P_T R P_T - P_T on the centered cone.

    Power iteration on the normal operator (the map is not self-adjoint),
    started from a seeded random tangent direction with zero row sums.
    Stops early once the Rayleigh estimate stagnates to relative 1e-6;
    the estimate approaches the true norm from below.
    """
    if power_iters < 10:
        raise ValueError("power_iters must be at least 10")
    if omega.n != f.n:
        raise ValueError("sample set and factor sizes differ")
    u = f.basis
    n = f.n
    scale = num_pairs(n) / omega.m

    def forward(y):
        t = _tangent_apply(u, y)
        return scale * _tangent_apply(u, r_omega(t, omega)) - t

    def adjoint(y):
        t = _tangent_apply(u, y)
        return scale * _tangent_apply(u, r_omega_star(t, omega)) - t

    rng = np.random.default_rng(0)
    s = rng.standard_normal((n, n))
    y = _tangent_apply(u, double_center(s + s.T))
    nrm = np.linalg.norm(y)
    if nrm == 0.0:
        return 0.0
    y /= nrm
    est = 0.0
    for _ in range(power_iters):
        # Project each iterate back onto symmetric zero-row-sum matrices:
        # on the complement the composed map acts as minus the identity, so
        # float-level leakage would otherwise take over whenever the true
        # norm is below one.
        z = double_center(adjoint(forward(y)))
        z = 0.5 * (z + z.T)
        lam = float(np.tensordot(y, z, axes=2))
        new = np.sqrt(max(lam, 0.0))
        done = abs(new - est) <= _STAGNATION_RTOL * max(new, 1e-30)
        est = new
        if done:
            break
        nrm = np.linalg.norm(z)
        if nrm == 0.0:
            break
        y = z / nrm
    return est


def diagnose(x, f, omega, power_iters=100):
    """Bundle all four constants for one (truth, factor, sample set) triple."""
    return DiagnosticsReport(
        nu_hat=coherence_nu(f),
        mu1_hat=mu1(x, f),
        kappa=condition_number(f),
        rip_deviation=rip_deviation(f, omega, power_iters),
        rip_samples=omega.m,
        power_iters=power_iters,
    )
