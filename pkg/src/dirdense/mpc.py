"""Massively-parallel peeling, simulated faithfully on one machine.

A phase compresses t threshold-peel steps into O(log t) synchronous rounds:
vertices whose degree exceeds alpha times their threshold are frozen (their
removal decisions are deferred so the sampled graph stays sparse), the rest
of the graph is edge-sampled at a rate that preserves degree estimates to a
(1 +- eps/3) factor, and the peel then runs on samples.  A phase ends early
the moment the would-be removals on the heavy side -- counting every frozen
vertex as potentially removable -- fit the eps/(1+eps) stopping budget; such
early returns are the candidate answers.

The driver chains phases per guess cell, feeding survivors forward, and
keeps the best early-returned pair by exact recounted density.  Cells whose
phase can no longer change anything (nothing removed, and the phase is
deterministic because sampling was skipped or it returned at the freeze
stage) are stopped immediately: rerunning an identical deterministic phase
cannot produce new candidates.

Round costs are declared accounting, not wall-clock: a phase costs
ceil(log2(max(2, t))) + 3 rounds (neighborhood doubling plus threshold
broadcast, freeze vote, and return sync); sweep totals take the maximum
over cells, which run in parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graph import (
    BipartiteGraph,
    DensityValue,
    VertexPair,
    compare_density,
    pair_edge_count,
)
from .peel import GuessGrid, Thresholds, as_fraction

__all__ = [
    "MpcParams",
    "RoundAccounting",
    "PhaseOutcome",
    "CellPhaseRow",
    "MpcResult",
    "mpc_phase",
    "run_mpc",
    "audit_neighborhoods",
    "alpha_for",
    "t_steps_for",
    "max_phases_for",
]


def _log_base(n: int, epsilon: Fraction) -> float:
    n_eff = max(2, int(n))
    return math.log(n_eff) / math.log(1.0 + float(epsilon))


def alpha_for(n: int, epsilon) -> float:
    """Freeze slack (1+eps)^sqrt(log_{1+eps} n); one phase peels past it."""
    eps = as_fraction(epsilon)
    return (1.0 + float(eps)) ** math.sqrt(_log_base(n, eps))


def t_steps_for(n: int, epsilon, delta: float) -> int:
    """Peel steps folded into one phase: max(1, floor(sqrt(delta*log)/2))."""
    eps = as_fraction(epsilon)
    return max(1, int(math.sqrt(delta * _log_base(n, eps)) / 2.0))


def max_phases_for(n: int, epsilon, delta: float) -> int:
    """Phase budget ceil(16*sqrt(delta*log)/delta); generous by design."""
    eps = as_fraction(epsilon)
    return max(1, math.ceil(16.0 * math.sqrt(delta * _log_base(n, eps)) / delta))


def ceil_log2(x: int) -> int:
    return max(1, int(x) - 1).bit_length()


def sampling_rate(n: int, epsilon, k) -> float:
    """Edge-sampling probability min(1, 18 ln n / (eps^2 k)).

    The constant is what a Chernoff bound needs for per-vertex degree
    estimates to hold with probability 1 - 1/n^3.
    """
    eps_f = float(as_fraction(epsilon))
    return min(1.0, 18.0 * math.log(max(2, n)) / (eps_f * eps_f * float(k)))


def sample_edges(
    g: BipartiteGraph, p: float, rng: np.random.Generator
) -> BipartiteGraph:
    """Keep each edge independently with probability p; p >= 1 is identity.

    Draws one uniform per edge in enumeration order, so a fixed generator
    state yields a fixed subgraph.  p <= 0 consumes no randomness.
    """
    if p >= 1.0:
        return g
    if p <= 0.0:
        keep = np.zeros(g.m, dtype=np.bool_)
    else:
        keep = rng.random(g.m) < p
    return BipartiteGraph(
        g.n_left, g.n_right, g.edge_left[keep], g.edge_right[keep]
    )


@dataclass(frozen=True)
class RoundAccounting:
    """Declared round model for sweep totals and the baseline comparison."""

    phase_overhead: int = 3
    baseline_per_pass: int = 1
    baseline_final: int = 1

    def phase_cost(self, t_steps: int) -> int:
        return ceil_log2(max(2, t_steps)) + self.phase_overhead


@dataclass(frozen=True)
class MpcParams:
    epsilon: Fraction
    delta: float
    seed: int
    accounting: RoundAccounting = RoundAccounting()

    def __post_init__(self):
        object.__setattr__(self, "epsilon", as_fraction(self.epsilon))
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not (0.0 < self.delta < 1.0):
            raise ValueError("delta must lie in (0, 1)")


@dataclass(frozen=True)
class PhaseOutcome:
    early: bool
    stage: str  # "freeze" | "sample" | "exhausted"
    steps_run: int
    removed: int
    f1: int
    f2: int
    p1: float
    p2: float
    s_size: int
    t_size: int
    deterministic: bool
    audit: dict | None = None


def mpc_phase(
    g: BipartiteGraph,
    th: Thresholds,
    alive_l: np.ndarray,
    alive_r: np.ndarray,
    rng: np.random.Generator,
    *,
    alpha: float,
    t_steps: int,
    collect_audit: bool = False,
) -> PhaseOutcome:
    """One phase; mutates the alive masks in place.

    Early-return tests are exact on integers (frozen counts charge the
    stopping budget directly); freeze and sampled-degree cuts are float,
    matching what the estimates are.
    """
    el, er = g.edge_left, g.edge_right
    s = int(alive_l.sum())
    t_sz = int(alive_r.sum())
    k_s = float(th.k_left)
    k_t = float(th.k_right)
    z = float(th.ratio_guess)
    n_eff = max(2, g.n)

    edge_alive = alive_l[el] & alive_r[er]
    deg_l = np.bincount(el[edge_alive], minlength=g.n_left)
    deg_r = np.bincount(er[edge_alive], minlength=g.n_right)
    frozen_l = alive_l & (deg_l > k_s * alpha)
    frozen_r = alive_r & (deg_r > k_t * alpha)
    f1 = int(frozen_l.sum())
    f2 = int(frozen_r.sum())

    p1 = sampling_rate(n_eff, th.epsilon, k_s)
    p2 = sampling_rate(n_eff, th.epsilon, k_t)
    deterministic = p1 >= 1.0 and p2 >= 1.0
    audit: dict | None = None
    if collect_audit:
        audit = {"frozen_l": frozen_l.copy(), "frozen_r": frozen_r.copy(), "steps": []}

    # too much mass is frozen: the sample cannot certify anything this phase
    root = math.sqrt(s * t_sz)
    if f1 >= z * root / alpha or f2 >= root / (z * alpha):
        return PhaseOutcome(
            True, "freeze", 0, 0, f1, f2, p1, p2, s, t_sz, deterministic, audit
        )

    # only both-ends-frozen edges are ignored: a surviving vertex's degree
    # estimate must still count its frozen neighbours
    live = edge_alive & ~(frozen_l[el] & frozen_r[er])
    removed = 0
    for step in range(t_steps):
        g1 = live if p1 >= 1.0 else live & (rng.random(el.shape[0]) < p1)
        g2 = live if p2 >= 1.0 else live & (rng.random(el.shape[0]) < p2)
        sdeg_l = np.bincount(el[g1], minlength=g.n_left)
        sdeg_r = np.bincount(er[g2], minlength=g.n_right)
        a_mask = alive_l & ~frozen_l & (sdeg_l < p1 * k_s)
        b_mask = alive_r & ~frozen_r & (sdeg_r < p2 * k_t)
        a_cnt = int(a_mask.sum())
        b_cnt = int(b_mask.sum())
        if audit is not None:
            audit["steps"].append(
                {"g1": g1.copy(), "g2": g2.copy(), "a": a_mask.copy(), "b": b_mask.copy()}
            )
        if th.left_heavy(s, t_sz) and th.small_loss(a_cnt, s, reserved=f1):
            return PhaseOutcome(
                True, "sample", step + 1, removed, f1, f2, p1, p2, s, t_sz,
                deterministic, audit,
            )
        if th.right_heavy(s, t_sz) and th.small_loss(b_cnt, t_sz, reserved=f2):
            return PhaseOutcome(
                True, "sample", step + 1, removed, f1, f2, p1, p2, s, t_sz,
                deterministic, audit,
            )
        alive_l &= ~a_mask
        alive_r &= ~b_mask
        s -= a_cnt
        t_sz -= b_cnt
        removed += a_cnt + b_cnt
        live &= alive_l[el] & alive_r[er]
    return PhaseOutcome(
        False, "exhausted", t_steps, removed, f1, f2, p1, p2, s, t_sz,
        deterministic, audit,
    )


@dataclass(frozen=True)
class CellPhaseRow:
    d_idx: int
    z_idx: int
    phase: int
    rounds: int
    s_size: int
    t_size: int
    f1: int
    f2: int
    early_return: bool
    stage: str


@dataclass(frozen=True)
class MpcResult:
    pair: VertexPair
    density: DensityValue
    rounds_total: int
    t_steps: int
    alpha: float
    machine_words: int
    grid: GuessGrid
    rows: tuple
    potential_pairs: tuple = field(default=())


def run_mpc(
    g: BipartiteGraph,
    params: MpcParams,
    *,
    grid: GuessGrid | None = None,
    max_phases: int | None = None,
    keep_pairs: bool = False,
) -> MpcResult:
    """Chain phases per guess cell; answer is the best early-returned pair.

    A cell's chain ends at its first early return: the returned sets are
    that guess's certified candidate and no vertex was removed, so every
    further phase would rerun on identical input.  Only size-reduction
    phases chain, which is also what keeps the deepest cell's round count
    logarithmic instead of budget-bound.

    Per-cell generators are seeded by (seed, d_idx, z_idx) so runs reproduce
    and cells stay independent.  Candidates are recounted against the
    original edges as they appear and only the best is retained, unless
    ``keep_pairs`` asks for the full list (costly on big sweeps).
    """
    if grid is None:
        grid = GuessGrid.for_n(g.n, params.epsilon)
    alpha = alpha_for(g.n, params.epsilon)
    t_steps = t_steps_for(g.n, params.epsilon, params.delta)
    if max_phases is None:
        max_phases = max_phases_for(g.n, params.epsilon, params.delta)
    phase_cost = params.accounting.phase_cost(t_steps)

    best_pair = VertexPair.empty()
    best_density = DensityValue.zero()
    kept = []
    rows = []
    rounds_total = 0
    for di, zi, th in grid.cells():
        rng = np.random.default_rng(np.random.SeedSequence((params.seed, di, zi)))
        alive_l = np.ones(g.n_left, dtype=np.bool_)
        alive_r = np.ones(g.n_right, dtype=np.bool_)
        cell_rounds = 0
        for phase in range(max_phases):
            out = mpc_phase(
                g, th, alive_l, alive_r, rng, alpha=alpha, t_steps=t_steps
            )
            cell_rounds += phase_cost
            rows.append(
                CellPhaseRow(
                    di, zi, phase, phase_cost, out.s_size, out.t_size,
                    out.f1, out.f2, out.early, out.stage,
                )
            )
            if out.early:
                pair = VertexPair(np.nonzero(alive_l)[0], np.nonzero(alive_r)[0])
                cnt = pair_edge_count(
                    g.edge_left, g.edge_right, pair, g.n_left, g.n_right
                )
                dens = DensityValue.from_counts(cnt, pair.s_size, pair.t_size)
                if keep_pairs:
                    kept.append((di, zi, phase, pair, dens))
                if compare_density(dens, best_density) > 0:
                    best_pair, best_density = pair, dens
                break
            # a deterministic phase that changed nothing would repeat forever
            if out.removed == 0 and out.deterministic:
                break
        rounds_total = max(rounds_total, cell_rounds)
    return MpcResult(
        pair=best_pair,
        density=best_density,
        rounds_total=rounds_total,
        t_steps=t_steps,
        alpha=alpha,
        machine_words=math.ceil(max(2, g.n) ** params.delta),
        grid=grid,
        rows=tuple(rows),
        potential_pairs=tuple(kept),
    )


def audit_neighborhoods(g: BipartiteGraph, t: int) -> int:
    """Largest t-hop ball in a (sampled) bipartite graph, self included.

    A machine running t local peel steps must first gather everything
    within distance t, so the peak ball size is the per-machine memory the
    phase would need.  Pass the sampled non-frozen subgraph to check the
    (36 ln n / eps^2 * alpha)^t memory claim.  BFS from every vertex;
    audit-scale only.
    """
    n = g.n
    if n == 0:
        return 0
    if t < 0:
        raise ValueError("t must be non-negative")
    peak = 0
    for start in range(n):
        visited = np.zeros(n, dtype=np.bool_)
        visited[start] = True
        frontier = np.array([start], dtype=np.int64)
        for _ in range(t):
            if frontier.size == 0:
                break
            hops = []
            for v in frontier:
                if v < g.n_left:
                    nbr = g.left_adj[g.left_ptr[v] : g.left_ptr[v + 1]] + g.n_left
                else:
                    w = v - g.n_left
                    nbr = g.right_adj[g.right_ptr[w] : g.right_ptr[w + 1]]
                hops.append(nbr)
            nxt = np.unique(np.concatenate(hops)) if hops else frontier[:0]
            nxt = nxt[~visited[nxt]]
            visited[nxt] = True
            frontier = nxt
        peak = max(peak, int(visited.sum()))
    return peak
