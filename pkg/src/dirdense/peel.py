"""Fixed-threshold peeling with stopping rules, and the guess grid it runs on.

For a density guess D and a side-ratio guess z, left vertices must keep
degree at least D/(2z) and right vertices at least D*z/2.  Peeling removes
everything below threshold each round, but stops early once the heavier side
loses at most an eps/(1+eps) fraction -- that is what caps the round count at
O(log n) regardless of adversarial structure.

Thresholds are exact rationals.  Degrees are integers, so ``deg < k`` is
evaluated as ``deg < ceil(k)`` with an exact ceiling; stopping rules compare
integer cross-products.  No float is consulted for any peel decision.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numba import njit

from .graph import (
    BipartiteGraph,
    DensityValue,
    VertexPair,
    compare_density,
    pair_edge_count,
)

__all__ = [
    "Thresholds",
    "GuessGrid",
    "PeelResult",
    "PeelCellStats",
    "PeelGridResult",
    "peel",
    "unguarded_peel",
    "peel_grid",
    "as_fraction",
    "ceil_fraction",
]


def as_fraction(x) -> Fraction:
    """Coerce to an exact rational; floats go through their shortest repr.

    repr(float) round-trips, so 0.2 becomes Fraction(1, 5) rather than the
    53-bit binary neighbour; grids stay cheap to compare exactly.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def ceil_fraction(f: Fraction) -> int:
    return -((-f.numerator) // f.denominator)


_CEIL_CLAMP = np.int64(2**62)  # beyond any possible degree


def _ceil64(f: Fraction) -> np.int64:
    return np.int64(min(ceil_fraction(f), int(_CEIL_CLAMP)))


@dataclass(frozen=True)
class Thresholds:
    """Degree floors for one (density guess, ratio guess) cell."""

    density_guess: Fraction
    ratio_guess: Fraction
    epsilon: Fraction
    k_left: Fraction
    k_right: Fraction

    @classmethod
    def of(cls, density_guess, ratio_guess, epsilon) -> "Thresholds":
        d = as_fraction(density_guess)
        z = as_fraction(ratio_guess)
        eps = as_fraction(epsilon)
        if d <= 0 or z <= 0:
            raise ValueError("guesses must be positive")
        if eps <= 0:
            raise ValueError("epsilon must be positive")
        return cls(d, z, eps, d / (2 * z), d * z / 2)

    def __post_init__(self):
        assert 4 * self.k_left * self.k_right == self.density_guess**2

    @property
    def k_left_ceil(self) -> int:
        """Smallest integer degree that survives the left threshold."""
        return ceil_fraction(self.k_left)

    @property
    def k_right_ceil(self) -> int:
        return ceil_fraction(self.k_right)

    @property
    def ratio_sq(self) -> Fraction:
        return self.ratio_guess * self.ratio_guess

    def left_heavy(self, s: int, t: int) -> bool:
        """|S| >= z^2 |T|, exactly."""
        q = self.ratio_sq
        return s * q.denominator >= q.numerator * t

    def right_heavy(self, s: int, t: int) -> bool:
        """|S| <= z^2 |T|, exactly."""
        q = self.ratio_sq
        return s * q.denominator <= q.numerator * t

    def small_loss(self, removed: int, size: int, reserved: int = 0) -> bool:
        """removed <= eps/(1+eps) * size - reserved, exactly."""
        a = self.epsilon.numerator
        b = self.epsilon.denominator
        return (removed + reserved) * (a + b) <= a * size


@dataclass(frozen=True)
class GuessGrid:
    """Geometric guesses: densities cover [1, n], ratios cover [1/sqrt n, sqrt n]."""

    epsilon: Fraction
    density_values: tuple
    ratio_values: tuple
    density_exponents: tuple
    ratio_exponents: tuple

    @classmethod
    def for_n(cls, n: int, epsilon) -> "GuessGrid":
        eps = as_fraction(epsilon)
        if eps <= 0:
            raise ValueError("epsilon must be positive")
        base = 1 + eps
        n_eff = max(2, int(n))
        bn, bd = base.numerator, base.denominator

        i, num, den = 0, 1, 1
        while num < n_eff * den:  # (1+eps)^i < n
            i += 1
            num *= bn
            den *= bd
        top = i

        j, num, den = 0, 1, 1
        while num * num < n_eff * den * den:  # (1+eps)^(2j) < n
            j += 1
            num *= bn
            den *= bd
        half = j

        d_exp = tuple(range(0, top + 1))
        z_exp = tuple(range(-half, half + 1))
        return cls(
            epsilon=eps,
            density_values=tuple(base**e for e in d_exp),
            ratio_values=tuple(base**e for e in z_exp),
            density_exponents=d_exp,
            ratio_exponents=z_exp,
        )

    @property
    def n_cells(self) -> int:
        return len(self.density_values) * len(self.ratio_values)

    def thresholds(self, d_idx: int, z_idx: int) -> Thresholds:
        return Thresholds.of(
            self.density_values[d_idx], self.ratio_values[z_idx], self.epsilon
        )

    def cells(self):
        """Yield (d_idx, z_idx, thresholds), density-major, ratio ascending."""
        for di in range(len(self.density_values)):
            for zi in range(len(self.ratio_values)):
                yield di, zi, self.thresholds(di, zi)


@dataclass(frozen=True)
class PeelResult:
    pair: VertexPair
    iterations: int


@dataclass(frozen=True)
class PeelCellStats:
    d_idx: int
    z_idx: int
    s_size: int
    t_size: int
    edge_count: int
    iterations: int

    def density(self) -> DensityValue:
        return DensityValue.from_counts(self.edge_count, self.s_size, self.t_size)


@dataclass(frozen=True)
class PeelGridResult:
    pair: VertexPair
    density: DensityValue
    best_cell: tuple
    cells: tuple


@njit(cache=True)
def _scan_below(deg, alive, kceil, out):
    cnt = 0
    for v in range(deg.shape[0]):
        if alive[v] and deg[v] < kceil:
            out[cnt] = v
            cnt += 1
    return cnt


@njit(cache=True)
def _mark_dead(buf, cnt, alive):
    for i in range(cnt):
        alive[buf[i]] = False


@njit(cache=True)
def _cascade(buf, cnt, ptr, adj, alive_other, deg_other, kceil_other, out):
    # decrement surviving neighbours of the dead batch; a vertex crosses the
    # threshold at exactly deg == kceil-1, so each is emitted once
    added = 0
    for i in range(cnt):
        v = buf[i]
        for e in range(ptr[v], ptr[v + 1]):
            w = adj[e]
            if alive_other[w]:
                d = deg_other[w] - 1
                deg_other[w] = d
                if d == kceil_other - 1:
                    out[added] = w
                    added += 1
    return added


class _PeelState:
    def __init__(self, g: BipartiteGraph, th: Thresholds):
        self.g = g
        self.alive_l = np.ones(g.n_left, dtype=np.bool_)
        self.alive_r = np.ones(g.n_right, dtype=np.bool_)
        self.deg_l = g.left_degrees().astype(np.int64)
        self.deg_r = g.right_degrees().astype(np.int64)
        self.kl = _ceil64(th.k_left)
        self.kr = _ceil64(th.k_right)
        self.s = g.n_left
        self.t = g.n_right
        self.a_cur = np.empty(g.n_left, dtype=np.int64)
        self.b_cur = np.empty(g.n_right, dtype=np.int64)
        self.a_nxt = np.empty(g.n_left, dtype=np.int64)
        self.b_nxt = np.empty(g.n_right, dtype=np.int64)
        self.a_cnt = _scan_below(self.deg_l, self.alive_l, self.kl, self.a_cur)
        self.b_cnt = _scan_below(self.deg_r, self.alive_r, self.kr, self.b_cur)

    def remove_batches(self):
        g = self.g
        _mark_dead(self.a_cur, self.a_cnt, self.alive_l)
        _mark_dead(self.b_cur, self.b_cnt, self.alive_r)
        nb = _cascade(
            self.a_cur, self.a_cnt, g.left_ptr, g.left_adj,
            self.alive_r, self.deg_r, self.kr, self.b_nxt,
        )
        na = _cascade(
            self.b_cur, self.b_cnt, g.right_ptr, g.right_adj,
            self.alive_l, self.deg_l, self.kl, self.a_nxt,
        )
        self.s -= self.a_cnt
        self.t -= self.b_cnt
        self.a_cur, self.a_nxt = self.a_nxt, self.a_cur
        self.b_cur, self.b_nxt = self.b_nxt, self.b_cur
        self.a_cnt, self.b_cnt = na, nb

    def pair(self) -> VertexPair:
        return VertexPair(np.nonzero(self.alive_l)[0], np.nonzero(self.alive_r)[0])


def peel(g: BipartiteGraph, th: Thresholds) -> PeelResult:
    """Peel below-threshold vertices until a stopping rule fires.

    Each round removes every left vertex under k_left and right vertex under
    k_right simultaneously, but first returns (S, T) as soon as the heavier
    side would lose at most an eps/(1+eps) fraction.  Returns the empty pair
    once both sides are gone (the heavy-side rule then holds vacuously).
    """
    st = _PeelState(g, th)
    iterations = 0
    while True:
        iterations += 1
        if th.left_heavy(st.s, st.t) and th.small_loss(st.a_cnt, st.s):
            return PeelResult(st.pair(), iterations)
        if th.right_heavy(st.s, st.t) and th.small_loss(st.b_cnt, st.t):
            return PeelResult(st.pair(), iterations)
        st.remove_batches()


def unguarded_peel(g: BipartiteGraph, th: Thresholds) -> PeelResult:
    """Peel to a fixpoint with no stopping rule; the adversarial comparator.

    Counts only rounds that removed something.
    """
    st = _PeelState(g, th)
    iterations = 0
    while st.a_cnt or st.b_cnt:
        iterations += 1
        st.remove_batches()
    return PeelResult(st.pair(), iterations)


def peel_grid(g: BipartiteGraph, epsilon, grid: GuessGrid | None = None) -> PeelGridResult:
    """Run peel over the whole guess grid; report the best recounted density.

    Densities are recounted from the surviving vertex sets against the
    original edges.  Ties break toward the earlier cell (density-major,
    ratio ascending).
    """
    if grid is None:
        grid = GuessGrid.for_n(g.n, epsilon)
    best_pair = VertexPair.empty()
    best_density = DensityValue.zero()
    best_cell = (0, 0)
    cells = []
    for di, zi, th in grid.cells():
        res = peel(g, th)
        cnt = pair_edge_count(g.edge_left, g.edge_right, res.pair, g.n_left, g.n_right)
        cells.append(
            PeelCellStats(di, zi, res.pair.s_size, res.pair.t_size, cnt, res.iterations)
        )
        d = DensityValue.from_counts(cnt, res.pair.s_size, res.pair.t_size)
        if compare_density(d, best_density) > 0:
            best_pair, best_density, best_cell = res.pair, d, (di, zi)
    return PeelGridResult(best_pair, best_density, best_cell, tuple(cells))
