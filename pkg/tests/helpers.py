"""Independent oracle implementations used to cross-check the package.

Everything here is written from the definitions, deliberately avoiding the
code paths under test: dense basis matrices assembled entry by entry, explicit
sums over sample multisets, full eigendecompositions, and brute-force pairwise
distances.
"""

import numpy as np


def centering_matrix(n):
    return np.eye(n) - np.ones((n, n)) / n


def brute_sqdist(points):
    """Pairwise squared distances by direct subtraction, points is (r, n)."""
    n = points.shape[1]
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            diff = points[:, i] - points[:, j]
            d[i, j] = diff @ diff
    return d


def random_centered_points(rng, r, n, scale=1.0):
    p = rng.standard_normal((r, n)) * scale
    return p - p.mean(axis=1, keepdims=True)


def random_gram(rng, n, r, scale=1.0):
    p = random_centered_points(rng, r, n, scale)
    return p.T @ p


def random_s_member(rng, n):
    """Random element of the symmetric zero-row-sum subspace."""
    a = rng.standard_normal((n, n))
    a = (a + a.T) / 2
    j = centering_matrix(n)
    return j @ a @ j


def all_pairs_list(n):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def oracle_w(alpha, n):
    i, j = alpha
    w = np.zeros((n, n))
    w[i, i] = 1.0
    w[j, j] = 1.0
    w[i, j] = -1.0
    w[j, i] = -1.0
    return w


def oracle_v(alpha, n):
    i, j = alpha
    a = -np.ones(n) / n
    b = -np.ones(n) / n
    a[i] += 1.0
    b[j] += 1.0
    return -0.5 * (np.outer(a, b) + np.outer(b, a))


def oracle_h_dense(n):
    pairs = all_pairs_list(n)
    ws = [oracle_w(p, n) for p in pairs]
    L = len(pairs)
    h = np.zeros((L, L))
    for p in range(L):
        for q in range(L):
            h[p, q] = np.sum(ws[p] * ws[q])
    return h


def oracle_h_inverse_dense(n):
    return np.linalg.inv(oracle_h_dense(n))


def oracle_r_omega_slow(x, pairs, n):
    """Explicit sum over the multiset of <X, w_a> v_a."""
    out = np.zeros((n, n))
    for alpha in pairs:
        out += np.sum(x * oracle_w(alpha, n)) * oracle_v(alpha, n)
    return out


def oracle_r_omega_star_slow(y, pairs, n):
    out = np.zeros((n, n))
    for alpha in pairs:
        out += np.sum(y * oracle_v(alpha, n)) * oracle_w(alpha, n)
    return out


def oracle_f_omega_slow(y, pairs, n):
    out = np.zeros((n, n))
    for alpha in pairs:
        out += np.sum(y * oracle_w(alpha, n)) * oracle_w(alpha, n)
    return out


def oracle_sum_v_squared(n):
    out = np.zeros((n, n))
    for alpha in all_pairs_list(n):
        v = oracle_v(alpha, n)
        out += v @ v
    return out


def oracle_tangent_projection(u, y):
    """Dense three-term formula P_U Y + Y P_U - P_U Y P_U."""
    pu = u @ u.T
    return pu @ y + y @ pu - pu @ y @ pu


def oracle_hard_threshold_dense(y, r):
    """Top-r by |eigenvalue| from a full decomposition, returned densified."""
    vals, vecs = np.linalg.eigh(y)
    keep = np.argsort(-np.abs(vals), kind="stable")[:r]
    return (vecs[:, keep] * vals[keep]) @ vecs[:, keep].T


def sym_basis(n):
    """Orthonormal basis of symmetric n x n matrices."""
    mats = []
    for i in range(n):
        e = np.zeros((n, n))
        e[i, i] = 1.0
        mats.append(e)
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros((n, n))
            e[i, j] = e[j, i] = 1.0 / np.sqrt(2.0)
            mats.append(e)
    return mats


def operator_matrix(op, n):
    """Matrix of a linear map on symmetric n x n matrices in an orthonormal basis."""
    basis = sym_basis(n)
    cols = []
    for b in basis:
        ob = op(b)
        cols.append([np.sum(ob * c) for c in basis])
    return np.array(cols).T
