"""Exact densest-pair oracle by subset enumeration.

Desk-scale ground truth for the approximation engines.  Enumerates every
non-empty left subset as a bitmask; for a fixed left set the best right set
of each size is a prefix of the right vertices sorted by how many edges they
send into the left set, so the right side never needs explicit enumeration.
All argmax comparisons are exact integer cross-multiplications -- float ties
cannot flip the winner.
"""

from __future__ import annotations

import numpy as np

from .graph import BipartiteGraph, DensityValue, VertexPair

__all__ = ["SizeCapExceeded", "exact_densest", "DEFAULT_CAP"]

DEFAULT_CAP = 14


class SizeCapExceeded(ValueError):
    """Raised when a side exceeds the enumeration cap."""

    def __init__(self, side: str, size: int, cap: int):
        self.cap = cap
        super().__init__(
            f"{side} side has {size} vertices, exceeding the enumeration cap of {cap}"
        )


def _exact_better(cnt_a, s_a, t_a, cnt_b, s_b, t_b) -> bool:
    """cnt_a/sqrt(s_a t_a) > cnt_b/sqrt(s_b t_b), exactly."""
    if cnt_b == 0 or s_b == 0 or t_b == 0:
        return cnt_a > 0 and s_a > 0 and t_a > 0
    if cnt_a == 0 or s_a == 0 or t_a == 0:
        return False
    return cnt_a * cnt_a * s_b * t_b > cnt_b * cnt_b * s_a * t_a


def exact_densest(g: BipartiteGraph, cap: int = DEFAULT_CAP) -> tuple[VertexPair, DensityValue]:
    """Return the maximum-density pair and its density.

    Ties break to the lexicographically smallest (left bitmask, right bitmask)
    pair, left first, so results are deterministic.  Parallel edges are
    counted with multiplicity.  Raises SizeCapExceeded when either side is
    larger than ``cap``.
    """
    nl, nr = g.n_left, g.n_right
    if nl > cap:
        raise SizeCapExceeded("left", nl, cap)
    if nr > cap:
        raise SizeCapExceeded("right", nr, cap)
    if g.m == 0 or nl == 0 or nr == 0:
        return VertexPair.empty(), DensityValue.zero()

    # weights[v, u] = multiplicity of edge (left u, right v)
    weights = np.zeros((nr, nl), dtype=np.int64)
    np.add.at(weights, (g.edge_right, g.edge_left), 1)

    masks = np.arange(1, 1 << nl, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(nl)) & 1).astype(np.int64)  # (2^nl - 1, nl)
    s_sizes = bits.sum(axis=1)

    into = bits @ weights.T  # (masks, nr): edges from right vertex v into S
    order = np.argsort(-into, axis=1, kind="stable")  # ties keep smaller v first
    sorted_into = np.take_along_axis(into, order, axis=1)
    cums = np.cumsum(sorted_into, axis=1)  # best edge count at each right size t

    t_sizes = np.arange(1, nr + 1, dtype=np.int64)
    dens = cums / np.sqrt((s_sizes[:, None] * t_sizes[None, :]).astype(np.float64))
    peak = float(dens.max())
    # shortlist near-maximal rows, then settle the winner exactly
    cand = np.argwhere(dens >= peak * (1.0 - 1e-9) - 1e-30)

    best = None  # (cnt, s, t, mask_idx)
    for mi, tj in cand[np.lexsort((cand[:, 1], cand[:, 0]))]:
        cnt = int(cums[mi, tj])
        s = int(s_sizes[mi])
        t = int(tj) + 1
        if best is None or _exact_better(cnt, s, t, best[0], best[1], best[2]):
            best = (cnt, s, t, int(mi))
    cnt, s, t, mi = best

    left = np.nonzero(bits[mi])[0]
    right = np.sort(order[mi, :t])
    pair = VertexPair(left, right)
    return pair, DensityValue.from_counts(cnt, s, t)
