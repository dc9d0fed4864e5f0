"""Observation-pattern generators and measurement extraction.

Uniform-with-replacement sampling drives the main recovery guarantees; the
structured scheme models anchor networks where only anchor-touching pairs are
ever observed. All randomness flows through a counter-based generator seeded
explicitly, so any trial can be replayed from its integer seed.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dualbasis import SampleSet, pair_values


def make_rng(seed):
    """Counter-based generator so trials replay exactly from one integer."""
    return np.random.Generator(np.random.Philox(seed))


@lru_cache(maxsize=8)
def _triu_cache(n):
    rows, cols = np.triu_indices(n, k=1)
    rows.setflags(write=False)
    cols.setflags(write=False)
    return rows, cols


def sample_uniform_replacement(n, m, seed):
    """m uniform draws with replacement from the L = n(n-1)/2 pairs."""
    if m < 1:
        raise ValueError("need at least one draw")
    rows, cols = _triu_cache(n)
    idx = make_rng(seed).integers(0, rows.size, size=m)
    return SampleSet(np.column_stack([rows[idx], cols[idx]]), n)


@dataclass(frozen=True)
class StructuredSpec:
    """Anchor-network observation pattern.

    :param anchors: number of pseudoanchors m_a.
    :param e_rate: Bernoulli rate for pairs within the pseudoanchor block.
    :param k: distinct pseudoanchor partners drawn for each mobile node.
    :param central: index of the fully-observed node; placed at the median
        non-anchor index when omitted.
    """

    anchors: int
    e_rate: float
    k: int
    central: int | None = None

    def __post_init__(self):
        if self.anchors < 1:
            raise ValueError("need at least one pseudoanchor")
        if not 0.0 <= self.e_rate <= 1.0:
            raise ValueError("e_rate must lie in [0, 1]")
        if not 1 <= self.k <= self.anchors:
            raise ValueError("k must lie in [1, anchors]")


def anchor_indices(n, m_a):
    """Pseudoanchor indices spaced uniformly through the index range.

    Rounding collisions are deduplicated, so fewer than m_a may come back
    when m_a is close to n.
    """
    if m_a + 1 > n:
        raise ValueError("need anchors + 1 <= n")
    if m_a == 1:
        return np.array([0], dtype=np.int64)
    t = np.arange(m_a)
    idx = np.rint(1.0 + t * (n - 1) / (m_a - 1)).astype(np.int64) - 1
    return np.unique(idx)


def central_index(n, anchors):
    """Median non-anchor index, lower median on even counts."""
    taken = {int(a) for a in anchors}
    cands = [i for i in range(n) if i not in taken]
    if not cands:
        raise ValueError("no free index left for the central node")
    return cands[(len(cands) - 1) // 2]


def sample_structured(n, spec, seed):
    """Central row + Bernoulli pseudoanchor block + k anchors per mobile.

    Mobile-mobile pairs are never drawn. Draw order is fixed (central row,
    anchor block, then mobile columns with sorted partners) so the serialized
    sample set reproduces byte for byte.
    """
    if spec.anchors + 1 > n:
        raise ValueError("need anchors + 1 <= n")
    rng = make_rng(seed)
    anchors = anchor_indices(n, spec.anchors)
    anchor_set = set(anchors.tolist())
    if spec.k > anchors.size:
        raise ValueError("k exceeds the number of distinct anchors")
    if spec.central is None:
        central = central_index(n, anchors)
    else:
        central = spec.central
        if not 0 <= central < n or central in anchor_set:
            raise ValueError("central node must be a non-anchor index")
    pairs = [(min(central, j), max(central, j)) for j in range(n) if j != central]
    a = anchors.tolist()
    flips = rng.random(size=len(a) * (len(a) - 1) // 2)
    pos = 0
    for s in range(len(a)):
        for t in range(s + 1, len(a)):
            if flips[pos] < spec.e_rate:
                pairs.append((a[s], a[t]))
            pos += 1
    mobiles = [i for i in range(n) if i != central and i not in anchor_set]
    for node in mobiles:
        chosen = np.sort(rng.choice(anchors, size=spec.k, replace=False))
        for partner in chosen.tolist():
            pairs.append((min(node, partner), max(node, partner)))
    return SampleSet(pairs, n)


def measure(x, omega):
    """Observed squared distances keyed by distinct pair.

    Values carry no multiplicity; repeat counts live in the SampleSet.
    """
    distinct = [ij for ij, _ in omega.counts()]
    rows = np.array([i for i, _ in distinct], dtype=np.int64)
    cols = np.array([j for _, j in distinct], dtype=np.int64)
    vals = pair_values(np.asarray(x, dtype=float), rows, cols)
    return {ij: float(v) for ij, v in zip(distinct, vals)}
