"""Synthetic point clouds and coordinate-file ingestion.

Generators return raw r x n coordinate arrays; centering happens at the
experiment layer. File readers center on ingest, since external files carry
arbitrary offsets.
"""

import numpy as np

from .sampling import make_rng


def _center_ingested(points):
    # Skip the subtraction when already centered: a residual mean of float
    # dust would flip low bits of near-zero coordinates, breaking the
    # write/read round-trip guarantee.
    mu = points.mean(axis=1)
    if np.linalg.norm(mu) <= 1e-13 * max(1.0, np.linalg.norm(points)):
        return points
    return points - mu[:, None]


def sphere_points(n):
    """n points on the unit 2-sphere along a Fibonacci spiral lattice."""
    if n < 1:
        raise ValueError("need at least one point")
    k = np.arange(n)
    z = 1.0 - (2.0 * k + 1.0) / n
    radius = np.sqrt(np.clip(1.0 - z**2, 0.0, None))
    theta = np.pi * (3.0 - np.sqrt(5.0)) * k
    return np.vstack([radius * np.cos(theta), radius * np.sin(theta), z])


def swiss_roll_points(n, seed):
    """Rolled 2-d sheet in 3-space: seeded jitter on a regular parameter grid."""
    if n < 1:
        raise ValueError("need at least one point")
    rng = make_rng(seed)
    rows = max(int(np.sqrt(n / 3.0)), 1)
    cols = -(-n // rows)
    tt, hh = np.meshgrid(
        np.linspace(0.0, 1.0, cols, endpoint=False),
        np.linspace(0.0, 1.0, rows, endpoint=False),
    )
    t = tt.ravel()[:n] + rng.uniform(0.0, 1.0 / cols, n)
    h = hh.ravel()[:n] + rng.uniform(0.0, 1.0 / rows, n)
    angle = 1.5 * np.pi * (1.0 + 2.0 * t)
    return np.vstack([angle * np.cos(angle), 21.0 * h, angle * np.sin(angle)])


def random_gaussian_points(n, r, seed):
    """n points with i.i.d. standard normal coordinates in dimension r."""
    if n < 1 or r < 1:
        raise ValueError("need positive point count and dimension")
    return make_rng(seed).standard_normal((r, n))


def ingest_xyz(path):
    """Read whitespace-separated coordinate rows; returns centered r x n points.

    The dimension is inferred from the column count of the first line and
    must be consistent throughout.
    """
    rows = []
    width = None
    with open(path) as fh:
        for k, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            fields = line.split()
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise ValueError(
                    f"{path}: line {k}: expected {width} columns, got {len(fields)}"
                )
            try:
                rows.append([float(f) for f in fields])
            except ValueError:
                raise ValueError(f"{path}: line {k}: malformed coordinate") from None
    if not rows:
        raise ValueError(f"{path}: no coordinate rows")
    return _center_ingested(np.asarray(rows, dtype=float).T)


def write_xyz(points, path):
    """Write one point per line at 17 significant digits (round-trip exact)."""
    points = np.asarray(points, dtype=float)
    with open(path, "w", newline="\n") as fh:
        for col in points.T:
            fh.write(" ".join(f"{v:.17g}" for v in col) + "\n")


def ingest_pdb(path):
    """Extract ATOM-record coordinates from a fixed-width PDB file, centered.

    Uses the standard column convention: x, y, z occupy character columns
    31-54 in three 8-wide fields. HETATM and all other records are skipped.
    """
    coords = []
    with open(path) as fh:
        for line in fh:
            if not line.startswith("ATOM"):
                continue
            try:
                xyz = [float(line[30:38]), float(line[38:46]), float(line[46:54])]
            except (ValueError, IndexError):
                raise ValueError(
                    f"{path}: malformed coordinates in ATOM record {len(coords) + 1}"
                ) from None
            coords.append(xyz)
    if not coords:
        raise ValueError(f"{path}: no ATOM records")
    return _center_ingested(np.asarray(coords, dtype=float).T)
