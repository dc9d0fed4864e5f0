"""Non-orthogonal pair basis {w_a} on the zero-row-sum symmetric subspace, its
explicit dual {v_a}, the correlation matrix H with closed-form inverse, and the
sampling operators R, R* and F built from the bases.

Index pairs are 0-based tuples (i, j) with i < j; the universal pair set over n
points has L = n(n-1)/2 elements. Sample sets are ordered multisets: repeated
pairs contribute once per occurrence in every operator.
"""

import numpy as np
from scipy import sparse

from .geometry import double_center

#: dense H / H^-1 assembly is test- and diagnostics-only; L = O(n^2) makes the
#: full matrix O(n^4) storage, so cap n
_DENSE_H_MAX_N = 40


def num_pairs(n):
    """Size L of the strictly upper triangular pair set."""
    return n * (n - 1) // 2


class SampleSet:
    """Ordered multiset of strictly upper triangular index pairs.

    :param pairs: iterable of (i, j) tuples with 0 <= i < j < n, or an (m, 2)
        integer array; draw order is preserved and repeats are kept.
    :param n: ambient number of points.
    """

    __slots__ = ("n", "rows", "cols")

    def __init__(self, pairs, n):
        arr = np.atleast_2d(np.array(pairs, dtype=np.int64))
        if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] == 0:
            raise ValueError("pairs must be a nonempty (m, 2) list of index tuples")
        rows = np.ascontiguousarray(arr[:, 0])
        cols = np.ascontiguousarray(arr[:, 1])
        if np.any(rows < 0) or np.any(cols >= n) or np.any(rows >= cols):
            raise ValueError(f"pairs must satisfy 0 <= i < j < n for n={n}")
        rows.setflags(write=False)
        cols.setflags(write=False)
        self.n = int(n)
        self.rows = rows
        self.cols = cols

    @property
    def m(self):
        """Multiset cardinality, repeats counted."""
        return self.rows.size

    def pair_list(self):
        return list(zip(self.rows.tolist(), self.cols.tolist()))

    def counts(self):
        """Distinct pairs with multiplicities, in first-occurrence order."""
        seen = {}
        for ij in self.pair_list():
            seen[ij] = seen.get(ij, 0) + 1
        return list(seen.items())

    def __len__(self):
        return self.m

    def __repr__(self):
        return f"SampleSet(m={self.m}, n={self.n})"


def all_pairs(n):
    """The universal SampleSet containing each pair exactly once."""
    rows, cols = np.triu_indices(n, k=1)
    return SampleSet(np.column_stack([rows, cols]), n)


def w_basis(alpha, n):
    """Basis matrix w_a with +1 at both diagonal slots and -1 off-diagonal.

    Satisfies <X, w_a> = D_ij for any symmetric X with squared distances D.
    """
    i, j = alpha
    w = np.zeros((n, n))
    w[i, i] = w[j, j] = 1.0
    w[i, j] = w[j, i] = -1.0
    return w


def v_basis(alpha, n):
    """Dual basis matrix v_a = -(1/2)(a b^T + b a^T) with a, b centered unit
    coordinates; bi-orthogonal to the w basis and zero row sums."""
    i, j = alpha
    a = np.full(n, -1.0 / n)
    b = np.full(n, -1.0 / n)
    a[i] += 1.0
    b[j] += 1.0
    return -0.5 * (np.outer(a, b) + np.outer(b, a))


def h_entry(alpha, beta):
    """<w_a, w_b>: 4 when equal, 1 when sharing one index, 0 when disjoint."""
    if alpha == beta:
        return 4.0
    shared = len(set(alpha) & set(beta))
    return 1.0 if shared == 1 else 0.0


def h_inverse_entry(alpha, beta, n):
    """Closed-form entry of H^-1 for the three overlap cases."""
    if alpha == beta:
        return 0.5 * (1.0 - 2.0 / n + 2.0 / n**2)
    shared = len(set(alpha) & set(beta))
    if shared == 1:
        return -1.0 / (2.0 * n) + 1.0 / n**2
    return 1.0 / n**2


def _pair_overlap_matrices(n):
    rows, cols = np.triu_indices(n, k=1)
    same = (rows[:, None] == rows[None, :]) & (cols[:, None] == cols[None, :])
    shared = (
        (rows[:, None] == rows[None, :]).astype(np.int8)
        + (rows[:, None] == cols[None, :])
        + (cols[:, None] == rows[None, :])
        + (cols[:, None] == cols[None, :])
    )
    return same, shared


def h_matrix(n):
    """Dense L x L Gram matrix of the w basis (small n only)."""
    if n > _DENSE_H_MAX_N:
        raise ValueError(f"dense H assembly capped at n <= {_DENSE_H_MAX_N}")
    same, shared = _pair_overlap_matrices(n)
    h = (shared >= 1).astype(float)
    h[same] = 4.0
    return h


def h_inverse_matrix(n):
    """Dense L x L closed-form inverse of H (small n only)."""
    if n > _DENSE_H_MAX_N:
        raise ValueError(f"dense H assembly capped at n <= {_DENSE_H_MAX_N}")
    same, shared = _pair_overlap_matrices(n)
    h = np.full((num_pairs(n), num_pairs(n)), 1.0 / n**2)
    h[shared >= 1] = -1.0 / (2.0 * n) + 1.0 / n**2
    h[same] = 0.5 * (1.0 - 2.0 / n + 2.0 / n**2)
    return h


def pair_values(x, rows, cols):
    """<X, w_a> = X_ii + X_jj - 2 X_ij for each listed pair of a dense X."""
    g = np.diag(x)
    return g[rows] + g[cols] - 2.0 * x[rows, cols]


def _masked_distance_matrix(vals, rows, cols, n):
    """Sparse symmetric matrix with vals at the sampled slots, repeats summed."""
    data = np.concatenate([vals, vals])
    r = np.concatenate([rows, cols])
    c = np.concatenate([cols, rows])
    return sparse.coo_matrix((data, (r, c)), shape=(n, n)).tocsr()


def r_omega(x, omega):
    """Sampling operator R(X) = sum over the multiset of <X, w_a> v_a.

    Computed by masking the squared distances of X onto the sample set (with
    multiplicities) and conjugating by the centering matrix, which is O(m + n^2)
    instead of a sum of m rank-2 terms.
    """
    x = np.asarray(x, dtype=float)
    vals = pair_values(x, omega.rows, omega.cols)
    s = _masked_distance_matrix(vals, omega.rows, omega.cols, omega.n)
    return -0.5 * double_center(s.toarray())


def r_omega_star(y, omega):
    """Adjoint operator R*(Y) = sum over the multiset of <Y, v_a> w_a."""
    y = np.asarray(y, dtype=float)
    z = double_center(y)
    coeff = -z[omega.rows, omega.cols]
    return _scatter_w(coeff, omega.rows, omega.cols, omega.n)


def f_omega(y, omega):
    """Frame operator F(Y) = sum over the multiset of <Y, w_a> w_a.

    Self-adjoint and positive semi-definite; the scatter is O(m).
    """
    y = np.asarray(y, dtype=float)
    t = pair_values(y, omega.rows, omega.cols)
    return _scatter_w(t, omega.rows, omega.cols, omega.n)


def _scatter_w(coeff, rows, cols, n):
    out = np.zeros((n, n))
    np.add.at(out, (rows, rows), coeff)
    np.add.at(out, (cols, cols), coeff)
    np.subtract.at(out, (rows, cols), coeff)
    np.subtract.at(out, (cols, rows), coeff)
    return out


def sum_v_squared(n):
    """Closed form sum of v_a @ v_a over all pairs: ((n^2-2n+2)/(4n)) J."""
    if n < 2:
        raise ValueError("need n >= 2")
    j = np.eye(n) - np.ones((n, n)) / n
    return (n * n - 2 * n + 2) / (4.0 * n) * j


def save_sample_set(omega, path):
    """Write "i j count" lines, 1-based, one distinct pair per line.

    Multiplicities are aggregated per pair in first-occurrence order, so a
    round trip preserves the multiset but not the interleaved draw order.
    """
    with open(path, "w", newline="\n") as fh:
        for (i, j), c in omega.counts():
            fh.write(f"{i + 1} {j + 1} {c}\n")


def load_sample_set(path, n=None):
    """Read the "i j count" format written by :func:`save_sample_set`.

    :param n: ambient size; defaults to the largest index in the file.
    """
    pairs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            fields = line.split()
            if len(fields) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'i j count'")
            try:
                i, j, c = (int(f) for f in fields)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: non-integer field") from exc
            if c < 1:
                raise ValueError(f"{path}:{lineno}: count must be positive")
            pairs.extend([(i - 1, j - 1)] * c)
    if not pairs:
        raise ValueError(f"{path}: no pairs found")
    if n is None:
        n = max(j for _, j in pairs) + 1
    return SampleSet(pairs, n)
