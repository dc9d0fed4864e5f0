"""Riemannian descent solvers for Gram-matrix completion from pair samples.

Both variants iterate X_{l+1} = H_r(X_l + alpha_l P_T G_l) with an adaptive
step; they differ in the gradient: frame descent uses the w-basis residual
G = sum_a (D_a - <X_l, w_a>) w_a, the pseudo-gradient variant maps the same
residual coefficients through the dual basis, G = R_Omega(X - X_l). All
per-iteration work is done in factored form; no n-by-n dense matrix is built.
"""

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import sparse

from .geometry import NonEuclideanWarning
from .manifold import LowRankFactor, TangentVector, retract_structured
from .sampling import measure

FRAME = "frame"
PSEUDO = "pseudo"


class SolverStatus(str, Enum):
    CONVERGED = "converged"
    MAX_ITERS = "max_iters"
    STEP_CLAMPED = "step_clamped"
    RANK_DEFICIENT = "rank_deficient"


@dataclass(frozen=True)
class Measurement:
    """Observed squared distances over a sample multiset.

    ``values`` maps each distinct pair of ``omega`` to its squared distance;
    multiplicity lives in the multiset and is applied by the solvers.
    """

    omega: object
    values: dict

    def __post_init__(self):
        try:
            aligned = np.array(
                [self.values[ij] for ij in zip(self.omega.rows.tolist(), self.omega.cols.tolist())],
                dtype=float,
            )
        except KeyError as missing:
            raise ValueError(f"no observed value for pair {missing}") from None
        aligned.setflags(write=False)
        object.__setattr__(self, "_aligned", aligned)

    @classmethod
    def from_gram(cls, x, omega):
        return cls(omega, measure(x, omega))

    def value_array(self):
        """Per-draw observations aligned with the multiset order."""
        return self._aligned


@dataclass(frozen=True)
class SolverConfig:
    rank: int
    max_iters: int = 1000
    rel_tol: float = 1e-5
    variant: str = FRAME
    track_truth: object = None

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.variant not in (FRAME, PSEUDO):
            raise ValueError(f"unknown variant {self.variant!r}")


@dataclass(frozen=True)
class SolverReport:
    iterations: int
    status: SolverStatus
    rel_change_trace: list
    step_trace: list
    truth_error_trace: list = None

    def __post_init__(self):
        ok = len(self.rel_change_trace) == self.iterations == len(self.step_trace)
        if self.truth_error_trace is not None:
            ok = ok and len(self.truth_error_trace) == self.iterations
        if not ok:
            raise ValueError("trace lengths must equal the iteration count")


def _model_pair_values(u, d, rows, cols):
    """<X_l, w_a> = X_ii + X_jj - 2 X_ij for the factored iterate."""
    node = (u**2) @ d
    cross = ((u[rows] * d) * u[cols]).sum(axis=1)
    return node[rows] + node[cols] - 2.0 * cross, node


def _frame_grad_times_u(c, rows, cols, n, u):
    """(sum_a c_a w_a) @ U without densifying the gradient."""
    diag = np.zeros(n)
    np.add.at(diag, rows, c)
    np.add.at(diag, cols, c)
    off = sparse.coo_matrix(
        (np.concatenate([-c, -c]), (np.concatenate([rows, cols]), np.concatenate([cols, rows]))),
        shape=(n, n),
    ).tocsr()
    return diag[:, None] * u + off @ u


def _pseudo_grad_times_u(c, rows, cols, n, u):
    """(-1/2) J S J @ U for the symmetric residual pattern S."""
    s = sparse.coo_matrix(
        (np.concatenate([c, c]), (np.concatenate([rows, cols]), np.concatenate([cols, rows]))),
        shape=(n, n),
    ).tocsr()
    ju = u - u.mean(axis=0)
    t1 = s @ ju
    return -0.5 * (t1 - t1.mean(axis=0))


def _tangent_pair_values(u, core, wing, rows, cols):
    """<Y, w_a> for Y = U core U^T + wing U^T + U wing^T at the listed pairs."""
    uc = u @ core
    ydiag = (uc * u).sum(axis=1) + 2.0 * (wing * u).sum(axis=1)
    yij = (
        (uc[rows] * u[cols]).sum(axis=1)
        + (wing[rows] * u[cols]).sum(axis=1)
        + (u[rows] * wing[cols]).sum(axis=1)
    )
    return ydiag[rows] + ydiag[cols] - 2.0 * yij, yij, ydiag


def _dual_pair_values(u, core, wing, yij, rows, cols, n):
    """<Y, v_a> = -(J Y J)_ij via factored row sums."""
    u1 = u.sum(axis=0)
    w1 = wing.sum(axis=0)
    rowsum = u @ (core @ u1) + wing @ u1 + u @ w1
    rm = rowsum / n
    tm = rowsum.sum() / n**2
    return -(yij - rm[rows] - rm[cols] + tm)


def _rel_change(old, new):
    # Subtract inside the shared column span; the naive d0^2 + d1^2 - 2*cross
    # form cancels catastrophically and cannot resolve changes below sqrt(eps).
    k0 = old.basis.shape[1]
    _, rmat = np.linalg.qr(np.hstack([old.basis, new.basis]))
    a, b = rmat[:, :k0], rmat[:, k0:]
    small = (b * new.spectrum) @ b.T - (a * old.spectrum) @ a.T
    d0 = np.linalg.norm(old.spectrum)
    return float(np.linalg.norm(small) / max(d0, 1e-30))


def _truth_error(f, truth, truth_norm):
    xu = truth @ f.basis
    quad = f.spectrum @ (f.basis * xu).sum(axis=0)
    d2 = f.spectrum @ f.spectrum
    err = np.sqrt(max(d2 + truth_norm**2 - 2.0 * quad, 0.0))
    return float(err / max(truth_norm, 1e-30))


def _descend(measured, cfg, x0, pseudo):
    omega = measured.omega
    n = omega.n
    rows, cols = omega.rows, omega.cols
    b = measured.value_array()
    truth = cfg.track_truth
    truth_norm = None
    if truth is not None:
        truth = np.asarray(truth, dtype=float)
        truth_norm = np.linalg.norm(truth)
    f = x0
    rel_trace, step_trace = [], []
    err_trace = [] if truth is not None else None
    status = SolverStatus.MAX_ITERS
    for _ in range(cfg.max_iters):
        u, d = f.basis, f.spectrum
        model, _ = _model_pair_values(u, d, rows, cols)
        c = b - model
        if pseudo:
            gu = _pseudo_grad_times_u(c, rows, cols, n, u)
        else:
            gu = _frame_grad_times_u(c, rows, cols, n, u)
        core = u.T @ gu
        core = (core + core.T) / 2
        wing = gu - u @ core
        num = float(np.sum(core**2) + 2.0 * np.sum(wing**2))
        if num == 0.0:
            status = SolverStatus.CONVERGED
            break
        t, yij, _ = _tangent_pair_values(u, core, wing, rows, cols)
        if pseudo:
            den = float(t @ _dual_pair_values(u, core, wing, yij, rows, cols, n))
        else:
            den = float(t @ t)
        if den <= 0.0:
            status = SolverStatus.STEP_CLAMPED
            break
        alpha = num / den
        g = TangentVector(f, core, wing)
        new = retract_structured(f, alpha, g, cfg.rank)
        rel = _rel_change(f, new)
        f = new
        step_trace.append(alpha)
        rel_trace.append(rel)
        if err_trace is not None:
            err_trace.append(_truth_error(f, truth, truth_norm))
        if rel <= cfg.rel_tol:
            status = SolverStatus.CONVERGED
            break
        if f.rank_deficient:
            status = SolverStatus.RANK_DEFICIENT
            break
    report = SolverReport(
        iterations=len(rel_trace),
        status=status,
        rel_change_trace=rel_trace,
        step_trace=step_trace,
        truth_error_trace=err_trace,
    )
    return f, report


def frame_descent(measured, cfg, x0):
    """Adaptive-step descent on the w-basis residual objective."""
    return _descend(measured, cfg, x0, pseudo=False)


def pseudo_gradient(measured, cfg, x0):
    """Descent along R_Omega(X - X_l); the step is clamped at zero because
    the sampling operator is not positive semidefinite."""
    return _descend(measured, cfg, x0, pseudo=True)


def solve(measured, cfg, x0):
    """Dispatch on cfg.variant."""
    if cfg.variant == PSEUDO:
        return pseudo_gradient(measured, cfg, x0)
    return frame_descent(measured, cfg, x0)


def run_to_points(result, r):
    """Spectral factorization of a recovered Gram factor into r-dim points.

    Negative retained spectrum entries are clamped to zero and flagged with
    a warning; the returned configuration is centered.
    """
    d = np.asarray(result.spectrum[:r], dtype=float)
    u = result.basis[:, :r]
    if np.any(d < 0):
        warnings.warn(
            "recovered factor has negative spectrum entries; clamping",
            NonEuclideanWarning,
        )
    p = np.sqrt(np.clip(d, 0.0, None))[:, None] * u.T
    return p - p.mean(axis=1, keepdims=True)
