"""One-pass streaming estimator for the directed densest subgraph.

Instead of storing edges, each guess cell keeps two counters per vertex and
side: a level and a fill.  An arriving edge (u, v) bumps the fill of
whichever endpoint currently has the lower level (both on a tie); a fill
reaching the cell's degree threshold resets and raises the level.  Vertex
levels are monotone, so suffix counts per level reconstruct the nested
candidate sets S_i = {v : level >= i} after (or at any point of) the pass.

Finalization scans levels upward and takes the first i where the heavier
side kept at least a 1/(1+eps) fraction of its predecessor; a cell whose
first qualifying level has an empty side reports nothing.  Across cells the
answer is the output of the largest density guess, ties broken toward the
smaller ratio guess; that selection never looks at densities.  Densities
are for reporting only and come from a separate recount read, which is
outside the single-pass model by design.

Edges arrive from a replayable pull source (any callable returning an
iterator of (src, dst) array batches), so a stream run never materializes
the edge list.  State is 4 machine integers per directed vertex per cell;
when the full grid exceeds the memory budget the source is replayed once
per batch of whole ratio columns, which cannot change any per-cell result
because cells never interact.
"""

from __future__ import annotations

from dataclasses import dataclass
from time import perf_counter_ns

import numpy as np
from numba import njit

from .graph import DensityValue, DirectedEdgeList, VertexPair
from .peel import GuessGrid, Thresholds, as_fraction

__all__ = [
    "level_cap",
    "GridStreamState",
    "CellOutput",
    "ZChoice",
    "StreamGridResult",
    "run_stream_grid",
    "run_stream_source",
    "query_anytime",
]


def level_cap(n_bipartite: int, epsilon) -> int:
    """Smallest c with (1+eps)^c >= n^2; the finalize scan stops there."""
    eps = as_fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    n_eff = max(2, int(n_bipartite))
    bn, bd = (1 + eps).numerator, (1 + eps).denominator
    c, num, den = 0, 1, 1
    target = n_eff * n_eff
    while num < target * den:
        c += 1
        num *= bn
        den *= bd
    return c


@njit(cache=True, inline="always")
def _push_one(u, v, c, lvl_l, fil_l, lvl_r, fil_r, kl, kr, cnt_l, cnt_r, cap):
    # level comparison uses the snapshot taken before either side updates
    lu = lvl_l[u, c]
    lv = lvl_r[v, c]
    if lu <= lv:
        f = fil_l[u, c] + 1
        if f >= kl[c]:
            fil_l[u, c] = 0
            lvl_l[u, c] = lu + 1
            if lu + 1 <= cap:
                cnt_l[c, lu + 1] += 1
        else:
            fil_l[u, c] = f
    if lu >= lv:
        f = fil_r[v, c] + 1
        if f >= kr[c]:
            fil_r[v, c] = 0
            lvl_r[v, c] = lv + 1
            if lv + 1 <= cap:
                cnt_r[c, lv + 1] += 1
        else:
            fil_r[v, c] = f


@njit(cache=True)
def _push_edge(u, v, lvl_l, fil_l, lvl_r, fil_r, kl, kr, cnt_l, cnt_r, cap):
    for c in range(kl.shape[0]):
        _push_one(u, v, c, lvl_l, fil_l, lvl_r, fil_r, kl, kr, cnt_l, cnt_r, cap)


@njit(cache=True)
def _push_batch(src, dst, lvl_l, fil_l, lvl_r, fil_r, kl, kr, cnt_l, cnt_r, cap):
    for e in range(src.shape[0]):
        u = src[e]
        v = dst[e]
        for c in range(kl.shape[0]):
            _push_one(u, v, c, lvl_l, fil_l, lvl_r, fil_r, kl, kr, cnt_l, cnt_r, cap)


@dataclass(frozen=True)
class CellOutput:
    """First qualifying level of one cell, with the set sizes found there."""

    level: int
    s_size: int
    t_size: int


class GridStreamState:
    """Level/fill counters for a set of labelled cells over one vertex set.

    Arrays are (n, C) so one edge touches two contiguous rows across every
    cell.  Thresholds enter as exact ceilings clamped to int64; a clamped
    threshold simply never levels up, which is the correct limit behaviour.
    """

    def __init__(self, n_directed: int, cells, thresholds, cap: int):
        if len(cells) != len(thresholds):
            raise ValueError("one threshold per cell")
        if len(thresholds) == 0:
            raise ValueError("need at least one cell")
        eps = thresholds[0].epsilon
        for th in thresholds:
            if th.epsilon != eps:
                raise ValueError("cells must share epsilon")
        self.n_directed = int(n_directed)
        self.cells = tuple(cells)  # (z_idx, d_idx) labels
        self.thresholds = tuple(thresholds)
        self.cap = int(cap)
        c = len(self.cells)
        clamp = 2**62
        self.kl = np.array(
            [min(th.k_left_ceil, clamp) for th in thresholds], dtype=np.int64
        )
        self.kr = np.array(
            [min(th.k_right_ceil, clamp) for th in thresholds], dtype=np.int64
        )
        self.lvl_l = np.zeros((n_directed, c), dtype=np.int32)
        self.fil_l = np.zeros((n_directed, c), dtype=np.int32)
        self.lvl_r = np.zeros((n_directed, c), dtype=np.int32)
        self.fil_r = np.zeros((n_directed, c), dtype=np.int32)
        self.cnt_l = np.zeros((c, self.cap + 1), dtype=np.int64)
        self.cnt_r = np.zeros((c, self.cap + 1), dtype=np.int64)
        self.edges_seen = 0

    @classmethod
    def for_grid(cls, n_directed: int, grid: GuessGrid, cap: int | None = None):
        """All cells of the grid, ratio-major with density guesses descending."""
        if cap is None:
            cap = level_cap(2 * n_directed, grid.epsilon)
        cells = []
        ths = []
        n_d = len(grid.density_values)
        for zi in range(len(grid.ratio_values)):
            for di in range(n_d - 1, -1, -1):
                cells.append((zi, di))
                ths.append(grid.thresholds(di, zi))
        return cls(n_directed, cells, ths, cap)

    @property
    def state_int_count(self) -> int:
        """Machine integers of per-vertex state held for one cell."""
        return 4 * self.n_directed

    def push(self, u: int, v: int):
        _push_edge(
            np.int64(u), np.int64(v),
            self.lvl_l, self.fil_l, self.lvl_r, self.fil_r,
            self.kl, self.kr, self.cnt_l, self.cnt_r, np.int64(self.cap),
        )
        self.edges_seen += 1

    def push_batch(self, src: np.ndarray, dst: np.ndarray):
        _push_batch(
            np.ascontiguousarray(src, dtype=np.int64),
            np.ascontiguousarray(dst, dtype=np.int64),
            self.lvl_l, self.fil_l, self.lvl_r, self.fil_r,
            self.kl, self.kr, self.cnt_l, self.cnt_r, np.int64(self.cap),
        )
        self.edges_seen += int(src.shape[0])

    def level_set_sizes(self, c: int, level: int) -> tuple:
        """(|S_i|, |T_i|) by direct scan of the level arrays, O(n)."""
        if level == 0:
            return self.n_directed, self.n_directed
        return (
            int(np.count_nonzero(self.lvl_l[:, c] >= level)),
            int(np.count_nonzero(self.lvl_r[:, c] >= level)),
        )

    def _finalize(self, c: int, sizes) -> CellOutput | None:
        th = self.thresholds[c]
        a = th.epsilon.numerator
        b = th.epsilon.denominator
        q = th.ratio_sq
        s_prev, t_prev = self.n_directed, self.n_directed
        for i in range(1, self.cap + 1):
            s_i, t_i = sizes(i)
            hit = False
            if s_i * q.denominator >= q.numerator * t_i:
                hit = s_i * (a + b) >= s_prev * b
            if not hit and s_i * q.denominator <= q.numerator * t_i:
                hit = t_i * (a + b) >= t_prev * b
            if hit:
                if s_i == 0 or t_i == 0:
                    return None
                return CellOutput(i, s_i, t_i)
            s_prev, t_prev = s_i, t_i
        return None

    def finalize_cell(self, c: int) -> CellOutput | None:
        """First level where the heavier side stopped shrinking by (1+eps).

        The scan is binding: if that level has an empty side the cell
        reports nothing rather than trying deeper levels.  Uses the
        incremental suffix counters; O(level_cap).
        """
        return self._finalize(
            c, lambda i: (int(self.cnt_l[c, i]), int(self.cnt_r[c, i]))
        )

    def finalize_cell_scan(self, c: int) -> CellOutput | None:
        """Same scan from materialized level sets, O(n * level_cap).

        Exists to cross-check the counter mode; the two must always agree.
        """
        return self._finalize(c, lambda i: self.level_set_sizes(c, i))

    def cell_pair(self, c: int, level: int) -> VertexPair:
        left = np.nonzero(self.lvl_l[:, c] >= level)[0]
        right = np.nonzero(self.lvl_r[:, c] >= level)[0]
        return VertexPair(left, right)


@dataclass(frozen=True)
class ZChoice:
    """Per ratio-column selection: the output of the largest density guess."""

    z_idx: int
    z_exponent: int
    d_idx: int
    level: int
    s_size: int
    t_size: int
    edge_count: int
    density: DensityValue
    pair: VertexPair


def _choose_columns(state: GridStreamState) -> dict:
    """Best output per ratio column among the state's cells (no densities).

    Cells are visited density-descending within a column, so the first
    output decides the column and lower guesses are skipped.
    """
    chosen: dict[int, tuple] = {}
    for c, (zi, di) in enumerate(state.cells):
        if zi in chosen and chosen[zi][0] >= di:
            continue
        out = state.finalize_cell(c)
        if out is None:
            continue
        chosen[zi] = (di, out, state.cell_pair(c, out.level))
    return chosen


def _recount_pairs(source, pairs, n_directed: int) -> np.ndarray:
    """Edge counts for many pairs in one pull pass over the stream."""
    left = np.zeros((len(pairs), n_directed), dtype=np.bool_)
    right = np.zeros((len(pairs), n_directed), dtype=np.bool_)
    for j, p in enumerate(pairs):
        left[j, p.left] = True
        right[j, p.right] = True
    counts = np.zeros(len(pairs), dtype=np.int64)
    for src, dst in source():
        for j in range(len(pairs)):
            counts[j] += int(np.count_nonzero(left[j][src] & right[j][dst]))
    return counts


@dataclass(frozen=True)
class StreamGridResult:
    pair: VertexPair
    density: DensityValue
    selected_density_guess: object  # Fraction of the winning D, or None
    per_z: tuple  # ZChoice | None, indexed by z_idx
    grid: GuessGrid
    cap: int
    state_ints_per_cell: int
    cells_per_edge: int
    edges_seen: int
    slices: int
    times_ns: np.ndarray | None = None


def run_stream_source(
    source,
    n_directed: int,
    epsilon,
    *,
    grid: GuessGrid | None = None,
    max_state_bytes: int = 2**30,
    timing: bool = False,
) -> StreamGridResult:
    """Stream every guess cell over a replayable pull source of edge batches.

    ``source`` is a zero-arg callable returning a fresh iterator of
    (src, dst) int array batches; it is replayed once per column slice and
    once more for the reporting recount.  In timing mode edges are pushed
    one at a time under a monotonic clock and per-edge nanoseconds
    accumulate across replays, charging each edge its full grid work.
    """
    n = int(n_directed)
    if grid is None:
        grid = GuessGrid.for_n(2 * n, epsilon)
    cap = level_cap(2 * n, grid.epsilon)

    n_d = len(grid.density_values)
    n_z = len(grid.ratio_values)
    bytes_per_col = 16 * max(1, n) * n_d
    cols_per_slice = max(1, min(n_z, int(max_state_bytes // bytes_per_col) or 1))

    times: np.ndarray | None = None
    edges_seen = 0
    chosen: dict[int, tuple] = {}
    n_slices = 0
    for z_lo in range(0, n_z, cols_per_slice):
        z_cols = range(z_lo, min(z_lo + cols_per_slice, n_z))
        cells = [(zi, di) for zi in z_cols for di in range(n_d - 1, -1, -1)]
        ths = [grid.thresholds(di, zi) for zi, di in cells]
        state = GridStreamState(n, cells, ths, cap)
        n_slices += 1
        if timing:
            parts = []
            for src, dst in source():
                buf = np.empty(src.shape[0], dtype=np.float64)
                for e in range(src.shape[0]):
                    t0 = perf_counter_ns()
                    state.push(src[e], dst[e])
                    buf[e] = perf_counter_ns() - t0
                parts.append(buf)
            arr = np.concatenate(parts) if parts else np.empty(0, dtype=np.float64)
            times = arr if times is None else times + arr
        else:
            for src, dst in source():
                state.push_batch(src, dst)
        edges_seen = state.edges_seen
        chosen.update(_choose_columns(state))

    order = sorted(chosen)  # z_idx ascending
    pairs = [chosen[zi][2] for zi in order]
    counts = _recount_pairs(source, pairs, n) if pairs else np.empty(0, np.int64)
    per_z: list[ZChoice | None] = [None] * n_z
    for j, zi in enumerate(order):
        di, out, pair = chosen[zi]
        per_z[zi] = ZChoice(
            z_idx=zi,
            z_exponent=grid.ratio_exponents[zi],
            d_idx=di,
            level=out.level,
            s_size=out.s_size,
            t_size=out.t_size,
            edge_count=int(counts[j]),
            density=DensityValue.from_counts(int(counts[j]), out.s_size, out.t_size),
            pair=pair,
        )

    best: ZChoice | None = None
    for ch in per_z:
        if ch is not None and (
            best is None or (ch.d_idx, -ch.z_idx) > (best.d_idx, -best.z_idx)
        ):
            best = ch
    return StreamGridResult(
        pair=best.pair if best else VertexPair.empty(),
        density=best.density if best else DensityValue.zero(),
        selected_density_guess=(
            grid.density_values[best.d_idx] if best else None
        ),
        per_z=tuple(per_z),
        grid=grid,
        cap=cap,
        state_ints_per_cell=4 * n,
        cells_per_edge=grid.n_cells,
        edges_seen=edges_seen,
        slices=n_slices,
        times_ns=times,
    )


def run_stream_grid(
    edges: DirectedEdgeList,
    epsilon,
    *,
    batch_size: int = 10000,
    grid: GuessGrid | None = None,
    max_state_bytes: int = 2**30,
    timing: bool = False,
) -> StreamGridResult:
    """`run_stream_source` over an in-memory edge list, in its given order."""
    return run_stream_source(
        lambda: edges.iter_batches(batch_size),
        edges.n_vertices,
        epsilon,
        grid=grid,
        max_state_bytes=max_state_bytes,
        timing=timing,
    )


def query_anytime(state: GridStreamState, edges: DirectedEdgeList):
    """Mid-stream answer from a full-grid state; state is not mutated.

    Selection (largest D, then smallest z) costs O(n * cells); the density
    recount of the single winning pair is the same offline reporting step
    run_stream_source performs and sits outside the one-pass model.
    """
    chosen = _choose_columns(state)
    best_key = None
    best = None
    for zi, (di, out, pair) in chosen.items():
        if best_key is None or (di, -zi) > best_key:
            best_key = (di, -zi)
            best = (out, pair)
    if best is None:
        return VertexPair.empty(), DensityValue.zero()
    out, pair = best
    counts = _recount_pairs(
        lambda: edges.iter_batches(65536), [pair], state.n_directed
    )
    return pair, DensityValue.from_counts(int(counts[0]), out.s_size, out.t_size)
