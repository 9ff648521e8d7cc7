"""Core graph types: directed edge lists, their bipartite view, and density.

A directed graph is scored through its bipartite view: every vertex appears
once on the left (as an edge source) and once on the right (as a target), and
a directed edge u->v becomes the bipartite edge (left u, right v).  The
density of a vertex pair (S, T) is then |E(S, T)| / sqrt(|S| * |T|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DirectedEdgeList",
    "BipartiteGraph",
    "VertexPair",
    "DensityValue",
    "to_bipartite",
    "density",
    "pair_edge_count",
    "compare_density",
]


def _as_int_array(values, dtype=np.int32):
    arr = np.asarray(values, dtype=dtype)
    if arr.ndim != 1:
        raise ValueError("expected a flat array of vertex ids")
    return arr


@dataclass(frozen=True)
class DirectedEdgeList:
    """A directed multigraph held as parallel source/target arrays.

    Vertex ids are dense in [0, n_vertices); edge order is the stream order
    and every transformation preserves it unless it says otherwise.
    ``orig_ids`` maps dense id -> original label when the list came from a
    file with sparse labels.
    """

    src: np.ndarray
    dst: np.ndarray
    n_vertices: int
    timestamps: np.ndarray | None = None
    orig_ids: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "src", _as_int_array(self.src))
        object.__setattr__(self, "dst", _as_int_array(self.dst))
        if self.src.shape != self.dst.shape:
            raise ValueError("src and dst must have equal length")
        if self.timestamps is not None:
            ts = np.asarray(self.timestamps, dtype=np.int64)
            if ts.shape != self.src.shape:
                raise ValueError("timestamps must align with edges")
            object.__setattr__(self, "timestamps", ts)
        if self.m and self.n_vertices > 0:
            hi = max(int(self.src.max()), int(self.dst.max()))
            lo = min(int(self.src.min()), int(self.dst.min()))
            if lo < 0 or hi >= self.n_vertices:
                raise ValueError("edge endpoint outside [0, n_vertices)")
        elif self.m:
            raise ValueError("edges present but n_vertices == 0")

    @property
    def m(self) -> int:
        return int(self.src.shape[0])

    @classmethod
    def from_pairs(cls, pairs, n_vertices=None, timestamps=None):
        """Build from an iterable of (source, target) pairs."""
        pairs = list(pairs)
        if pairs:
            src = np.array([p[0] for p in pairs], dtype=np.int32)
            dst = np.array([p[1] for p in pairs], dtype=np.int32)
        else:
            src = np.empty(0, dtype=np.int32)
            dst = np.empty(0, dtype=np.int32)
        if n_vertices is None:
            n_vertices = int(max(src.max(initial=-1), dst.max(initial=-1))) + 1
        return cls(src, dst, int(n_vertices), timestamps=timestamps)

    def iter_batches(self, batch_size: int):
        """Yield (src, dst) array views in stream order; never copies."""
        if batch_size <= 0:
            raise ValueError("batch_size must be positive")
        for lo in range(0, self.m, batch_size):
            hi = min(lo + batch_size, self.m)
            yield self.src[lo:hi], self.dst[lo:hi]


def _csr(keys: np.ndarray, values: np.ndarray, n: int):
    ptr = np.zeros(n + 1, dtype=np.int64)
    counts = np.bincount(keys, minlength=n) if keys.size else np.zeros(n, dtype=np.int64)
    ptr[1:] = np.cumsum(counts)
    order = np.argsort(keys, kind="stable")
    return ptr, np.ascontiguousarray(values[order])


@dataclass(frozen=True)
class BipartiteGraph:
    """Immutable bipartite multigraph with CSR adjacency on both sides.

    ``edge_left``/``edge_right`` keep the original edge order; the CSR views
    are derived and share no ordering guarantees beyond stability.
    """

    n_left: int
    n_right: int
    edge_left: np.ndarray
    edge_right: np.ndarray
    left_ptr: np.ndarray = field(repr=False, default=None)
    left_adj: np.ndarray = field(repr=False, default=None)
    right_ptr: np.ndarray = field(repr=False, default=None)
    right_adj: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        el = _as_int_array(self.edge_left)
        er = _as_int_array(self.edge_right)
        object.__setattr__(self, "edge_left", el)
        object.__setattr__(self, "edge_right", er)
        if el.shape != er.shape:
            raise ValueError("edge arrays must align")
        if self.left_ptr is None:
            lptr, ladj = _csr(el, er, self.n_left)
            rptr, radj = _csr(er, el, self.n_right)
            object.__setattr__(self, "left_ptr", lptr)
            object.__setattr__(self, "left_adj", ladj)
            object.__setattr__(self, "right_ptr", rptr)
            object.__setattr__(self, "right_adj", radj)

    @property
    def n(self) -> int:
        return self.n_left + self.n_right

    @property
    def m(self) -> int:
        return int(self.edge_left.shape[0])

    def left_degrees(self) -> np.ndarray:
        return np.diff(self.left_ptr)

    def right_degrees(self) -> np.ndarray:
        return np.diff(self.right_ptr)


def to_bipartite(el: DirectedEdgeList) -> BipartiteGraph:
    """Expand a directed graph into its two-sided view.

    Both sides carry one slot per directed vertex; self-loops are legal and
    become an edge between a vertex's two copies.  Parallel edges survive.
    """
    return BipartiteGraph(
        n_left=el.n_vertices,
        n_right=el.n_vertices,
        edge_left=el.src.copy(),
        edge_right=el.dst.copy(),
    )


class VertexPair:
    """A (left set, right set) candidate answer, stored as sorted id arrays."""

    __slots__ = ("left", "right")

    def __init__(self, left, right):
        self.left = np.unique(np.asarray(left, dtype=np.int64))
        self.right = np.unique(np.asarray(right, dtype=np.int64))

    @classmethod
    def empty(cls) -> "VertexPair":
        return cls((), ())

    @property
    def s_size(self) -> int:
        return int(self.left.shape[0])

    @property
    def t_size(self) -> int:
        return int(self.right.shape[0])

    @property
    def is_empty(self) -> bool:
        return self.s_size == 0 and self.t_size == 0

    def __eq__(self, other):
        if not isinstance(other, VertexPair):
            return NotImplemented
        return np.array_equal(self.left, other.left) and np.array_equal(
            self.right, other.right
        )

    def __hash__(self):
        return hash((self.left.tobytes(), self.right.tobytes()))

    def __repr__(self):
        return f"VertexPair(|S|={self.s_size}, |T|={self.t_size})"


@dataclass(frozen=True)
class DensityValue:
    """An edge count over a vertex pair, with its scale-free score.

    value == edge_count / sqrt(s_size * t_size), or 0.0 when either side is
    empty.  The integer fields allow exact comparisons; ``value`` is for
    reporting.
    """

    value: float
    edge_count: int
    s_size: int
    t_size: int

    @classmethod
    def from_counts(cls, edge_count: int, s_size: int, t_size: int) -> "DensityValue":
        if s_size < 0 or t_size < 0 or edge_count < 0:
            raise ValueError("counts must be non-negative")
        if s_size == 0 or t_size == 0:
            return cls(0.0, int(edge_count), int(s_size), int(t_size))
        return cls(
            edge_count / math.sqrt(s_size * t_size),
            int(edge_count),
            int(s_size),
            int(t_size),
        )

    @classmethod
    def zero(cls) -> "DensityValue":
        return cls(0.0, 0, 0, 0)


def compare_density(a: DensityValue, b: DensityValue) -> int:
    """Exact three-way comparison of densities (-1, 0, 1), no float ties.

    Compares edge_count_a^2 * (s_b * t_b) against edge_count_b^2 * (s_a * t_a)
    in integer arithmetic; empty-side densities count as zero.
    """
    a_zero = a.edge_count == 0 or a.s_size == 0 or a.t_size == 0
    b_zero = b.edge_count == 0 or b.s_size == 0 or b.t_size == 0
    if a_zero and b_zero:
        return 0
    if a_zero:
        return -1
    if b_zero:
        return 1
    lhs = a.edge_count * a.edge_count * b.s_size * b.t_size
    rhs = b.edge_count * b.edge_count * a.s_size * a.t_size
    return (lhs > rhs) - (lhs < rhs)


def pair_edge_count(src: np.ndarray, dst: np.ndarray, pair: VertexPair, n_left: int, n_right: int) -> int:
    """Count edges with source in pair.left and target in pair.right."""
    if pair.s_size == 0 or pair.t_size == 0 or src.shape[0] == 0:
        return 0
    mask_l = np.zeros(n_left, dtype=bool)
    mask_l[pair.left] = True
    mask_r = np.zeros(n_right, dtype=bool)
    mask_r[pair.right] = True
    return int(np.count_nonzero(mask_l[src] & mask_r[dst]))


def density(g: BipartiteGraph, pair: VertexPair) -> DensityValue:
    """Recount the density of a pair directly against the graph's edges."""
    cnt = pair_edge_count(g.edge_left, g.edge_right, pair, g.n_left, g.n_right)
    return DensityValue.from_counts(cnt, pair.s_size, pair.t_size)
