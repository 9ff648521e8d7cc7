"""Deterministic graph generators used by tests, verification suites and docs."""

from __future__ import annotations

import numpy as np

from .graph import DirectedEdgeList

__all__ = [
    "bidirected_clique",
    "directed_complete_bipartite",
    "random_directed_gnp",
    "make_peeling_adversary",
    "acceptance_corpus",
    "uniform_random_stream",
    "planted_block",
]

CORPUS_SEED = 1729
CORPUS_SIZE = 200


def bidirected_clique(k: int) -> DirectedEdgeList:
    """Complete graph on k vertices with every edge in both directions."""
    pairs = []
    for a in range(k):
        for b in range(a + 1, k):
            pairs.append((a, b))
            pairs.append((b, a))
    return DirectedEdgeList.from_pairs(pairs, n_vertices=k)


def directed_complete_bipartite(a: int, b: int) -> DirectedEdgeList:
    """a source vertices each pointing at all b target vertices."""
    pairs = [(i, a + j) for i in range(a) for j in range(b)]
    return DirectedEdgeList.from_pairs(pairs, n_vertices=a + b)


def random_directed_gnp(n: int, p: float, seed) -> DirectedEdgeList:
    """Each ordered pair (u, v), u != v, is an edge independently with prob p."""
    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < p
    np.fill_diagonal(mask, False)
    src, dst = np.nonzero(mask)
    return DirectedEdgeList(src.astype(np.int32), dst.astype(np.int32), n)


def make_peeling_adversary(clique_size: int, extra: int) -> DirectedEdgeList:
    """Two components that defeat unguarded fixed-threshold peeling.

    Component one is a bidirected complete graph on ``clique_size`` vertices
    (the dense answer).  Component two starts as a bidirected clique on
    (clique_size+1)//2 vertices and is extended by ``extra`` vertices, each
    linked to the (clique_size-3)//2 vertices immediately before it.  At the
    threshold (clique_size-1)/2 the extension erodes strictly one vertex per
    iteration, right to left, so peeling without a stopping rule needs a
    linear number of iterations while the guarded version stops immediately.
    """
    if clique_size < 3 or clique_size % 2 == 0:
        raise ValueError("clique_size must be odd and >= 3")
    if extra < 0:
        raise ValueError("extra must be >= 0")
    undirected = []
    for a in range(clique_size):
        for b in range(a + 1, clique_size):
            undirected.append((a, b))
    base = (clique_size + 1) // 2
    off = clique_size
    for a in range(base):
        for b in range(a + 1, base):
            undirected.append((off + a, off + b))
    back = (clique_size - 3) // 2
    for i in range(base, base + extra):
        for j in range(max(0, i - back), i):
            undirected.append((off + j, off + i))
    pairs = []
    for a, b in undirected:
        pairs.append((a, b))
        pairs.append((b, a))
    return DirectedEdgeList.from_pairs(pairs, n_vertices=off + base + extra)


def acceptance_corpus(count: int = CORPUS_SIZE, seed: int = CORPUS_SEED):
    """The seeded random-graph corpus shared by the acceptance checks.

    Sides of 8..12 vertices, edge probability cycling over 0.2/0.5/0.8.
    """
    graphs = []
    probs = (0.2, 0.5, 0.8)
    for idx in range(count):
        ss = np.random.SeedSequence((seed, idx))
        rng = np.random.default_rng(ss)
        n = int(rng.integers(8, 13))
        graphs.append(random_directed_gnp(n, probs[idx % 3], rng))
    return graphs


def uniform_random_stream(n: int, m: int, seed) -> DirectedEdgeList:
    """A multigraph stream of m uniformly random ordered pairs (loops allowed)."""
    rng = np.random.default_rng(seed)
    src = rng.integers(0, n, size=m, dtype=np.int32)
    dst = rng.integers(0, n, size=m, dtype=np.int32)
    return DirectedEdgeList(src, dst, n)


def planted_block(n: int, block: int, noise_edges: int, seed) -> DirectedEdgeList:
    """Sparse noise with a dense directed block planted on vertices 0..block-1.

    The block contributes every ordered pair inside it (no loops), so the
    densest pair has density at least block - 1.
    """
    if block > n:
        raise ValueError("block larger than the graph")
    rng = np.random.default_rng(seed)
    bs, bd = np.nonzero(~np.eye(block, dtype=bool))
    ns = rng.integers(0, n, size=noise_edges, dtype=np.int32)
    nd = rng.integers(0, n, size=noise_edges, dtype=np.int32)
    src = np.concatenate([bs.astype(np.int32), ns])
    dst = np.concatenate([bd.astype(np.int32), nd])
    return DirectedEdgeList(src, dst, n)
