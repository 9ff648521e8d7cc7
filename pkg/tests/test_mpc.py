"""Tests for the freeze/sample/peel phase simulator and its round ledger."""

import math
from fractions import Fraction

import numpy as np
import pytest

from dirdense.fixtures import (
    bidirected_clique,
    random_directed_gnp,
    uniform_random_stream,
)
from dirdense.graph import (
    BipartiteGraph,
    DensityValue,
    DirectedEdgeList,
    VertexPair,
    compare_density,
    pair_edge_count,
    to_bipartite,
)
from dirdense.mpc import (
    MpcParams,
    alpha_for,
    audit_neighborhoods,
    ceil_log2,
    mpc_phase,
    run_mpc,
    sample_edges,
    sampling_rate,
    t_steps_for,
)
from dirdense.peel import Thresholds, peel_grid
from dirdense.verify import density_meets, sampling_lemma_suite

EPS = Fraction(1, 5)


def fresh_masks(g):
    return np.ones(g.n_left, np.bool_), np.ones(g.n_right, np.bool_)


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            MpcParams(0, 0.5, seed=1)
        with pytest.raises(ValueError):
            MpcParams(EPS, 0.0, seed=1)
        with pytest.raises(ValueError):
            MpcParams(EPS, 1.0, seed=1)

    def test_derived_quantities(self):
        # alpha = (1+eps)^sqrt(log_{1+eps} n); for K4's bipartite n = 8 it
        # sits below 2, which is what makes every clique vertex freeze
        assert alpha_for(8, EPS) == pytest.approx(1.8510, abs=1e-4)
        assert t_steps_for(8, EPS, 0.5) == 1
        log8 = math.log(8) / math.log(1.2)
        assert t_steps_for(8, EPS, 0.5) == max(1, int(math.sqrt(0.5 * log8) / 2))
        assert ceil_log2(1) == 1
        assert ceil_log2(2) == 1
        assert ceil_log2(5) == 3

    def test_sampling_rate_clamps(self):
        assert sampling_rate(8, EPS, Fraction(3, 2)) == 1.0
        p = sampling_rate(1024, Fraction(1, 2), 1000)
        assert 0.0 < p < 1.0
        assert p == pytest.approx(18 * math.log(1024) / (0.25 * 1000))


class TestSampleEdges:
    def test_p_one_is_identity(self):
        g = to_bipartite(uniform_random_stream(20, 100, seed=0))
        assert sample_edges(g, 1.0, np.random.default_rng(0)) is g

    def test_p_zero_is_empty(self):
        g = to_bipartite(uniform_random_stream(20, 100, seed=0))
        assert sample_edges(g, 0.0, np.random.default_rng(0)).m == 0

    def test_half_rate_concentrates(self):
        g = to_bipartite(uniform_random_stream(100, 100_000, seed=1))
        five_sigma = 5 * math.sqrt(100_000 * 0.25)
        for seed in range(3):
            kept = sample_edges(g, 0.5, np.random.default_rng(seed)).m
            assert abs(kept - 50_000) <= five_sigma

    def test_fixed_seed_reproduces(self):
        g = to_bipartite(uniform_random_stream(30, 500, seed=2))
        a = sample_edges(g, 0.3, np.random.default_rng(11))
        b = sample_edges(g, 0.3, np.random.default_rng(11))
        np.testing.assert_array_equal(a.edge_left, b.edge_left)
        np.testing.assert_array_equal(a.edge_right, b.edge_right)


class TestPhase:
    def test_clique_freezes_everything_and_returns_whole_pair(self):
        # at D=3, z=1 every degree-3 vertex exceeds k*alpha = 1.5*1.851,
        # so the freeze budget itself certifies the pair
        g = to_bipartite(bidirected_clique(4))
        alive_l, alive_r = fresh_masks(g)
        out = mpc_phase(
            g,
            Thresholds.of(3, 1, EPS),
            alive_l,
            alive_r,
            np.random.default_rng(0),
            alpha=alpha_for(8, EPS),
            t_steps=t_steps_for(8, EPS, 0.5),
        )
        assert out.early and out.stage == "freeze"
        assert out.f1 == 4 and out.f2 == 4
        assert alive_l.all() and alive_r.all()

    def test_star_hub_freeze_forces_early_return(self):
        star = DirectedEdgeList([0] * 10, range(1, 11), 11)
        g = to_bipartite(star)
        alive_l, alive_r = fresh_masks(g)
        out = mpc_phase(
            g,
            Thresholds.of(1, Fraction(1, 8), EPS),
            alive_l,
            alive_r,
            np.random.default_rng(0),
            alpha=alpha_for(22, EPS),
            t_steps=1,
        )
        assert out.early and out.stage == "freeze"
        assert out.f1 == 1  # the hub; 1 >= z*sqrt(|S||T|)/alpha

    def test_empty_graph_returns_empty_early(self):
        g = BipartiteGraph(0, 0, np.array([], np.int32), np.array([], np.int32))
        out = mpc_phase(
            g,
            Thresholds.of(1, 1, EPS),
            np.zeros(0, np.bool_),
            np.zeros(0, np.bool_),
            np.random.default_rng(0),
            alpha=2.0,
            t_steps=1,
        )
        assert out.early and out.f1 == 0 and out.f2 == 0
        assert out.s_size == 0 and out.t_size == 0

    def test_frozen_vertices_exceed_scaled_threshold(self):
        g = to_bipartite(uniform_random_stream(40, 600, seed=5))
        th = Thresholds.of(8, 1, EPS)
        alpha = alpha_for(g.n, EPS)
        alive_l, alive_r = fresh_masks(g)
        out = mpc_phase(
            g, th, alive_l, alive_r, np.random.default_rng(1),
            alpha=alpha, t_steps=2, collect_audit=True,
        )
        deg_l = np.bincount(g.edge_left, minlength=g.n_left)
        deg_r = np.bincount(g.edge_right, minlength=g.n_right)
        frozen_l = out.audit["frozen_l"]
        frozen_r = out.audit["frozen_r"]
        assert np.array_equal(frozen_l, deg_l > float(th.k_left) * alpha)
        assert np.array_equal(frozen_r, deg_r > float(th.k_right) * alpha)
        assert out.f1 == int(frozen_l.sum()) and out.f2 == int(frozen_r.sum())

    def test_exhausted_phases_shrink_a_side(self):
        # guesses above the true density must erode the sets geometrically;
        # at 2^16 vertices the asymptotic shrink factor is in force
        n, m = 1 << 16, 2_000_000
        g = to_bipartite(uniform_random_stream(n, m, seed=21))
        eps, delta = Fraction(1, 2), 0.5
        alpha = alpha_for(g.n, eps)
        t = t_steps_for(g.n, eps, delta)
        log_n = math.log(g.n) / math.log(float(1 + eps))
        shrink = float(1 + eps) ** (math.sqrt(delta * log_n) / 8.0)
        saw_exhausted = 0
        for i in (10, 12):
            th = Thresholds.of(Fraction(3, 2) ** i, 1, eps)
            alive_l, alive_r = fresh_masks(g)
            rng = np.random.default_rng(7)
            prev = (n, n)
            for _ in range(12):
                out = mpc_phase(
                    g, th, alive_l, alive_r, rng, alpha=alpha, t_steps=t
                )
                if out.early:
                    break
                s_new, t_new = int(alive_l.sum()), int(alive_r.sum())
                ratio_s = prev[0] / s_new if s_new else math.inf
                ratio_t = prev[1] / t_new if t_new else math.inf
                assert max(ratio_s, ratio_t) >= shrink
                saw_exhausted += 1
                prev = (s_new, t_new)
                if s_new == 0 and t_new == 0:
                    break
        assert saw_exhausted >= 3

    def test_correct_guess_returns_early_via_sampling_branch(self):
        n, m = 1 << 16, 2_000_000
        g = to_bipartite(uniform_random_stream(n, m, seed=21))
        eps = Fraction(1, 2)
        # whole-graph density is m/n ~ 30.5, so 1.5^8 ~ 25.6 guesses low
        th = Thresholds.of(Fraction(3, 2) ** 8, 1, eps)
        alive_l, alive_r = fresh_masks(g)
        out = mpc_phase(
            g, th, alive_l, alive_r, np.random.default_rng(7),
            alpha=alpha_for(g.n, eps), t_steps=t_steps_for(g.n, eps, 0.5),
        )
        assert out.early and out.stage == "sample"
        assert alive_l.all() and alive_r.all()


class TestAudit:
    def test_edgeless_peak_is_one(self):
        g = BipartiteGraph(3, 3, np.array([], np.int32), np.array([], np.int32))
        assert audit_neighborhoods(g, 2) == 1

    def test_path_two_hop_ball(self):
        # alternating 11-vertex path; the middle vertex sees 5 within 2 hops
        left = np.array([0, 1, 1, 2, 2, 3, 3, 4, 4, 5], np.int32)
        right = np.array([0, 0, 1, 1, 2, 2, 3, 3, 4, 4], np.int32)
        g = BipartiteGraph(6, 5, left, right)
        assert audit_neighborhoods(g, 2) == 5
        assert audit_neighborhoods(g, 0) == 1

    def test_rejects_negative_depth(self):
        g = BipartiteGraph(2, 2, np.array([0], np.int32), np.array([0], np.int32))
        with pytest.raises(ValueError):
            audit_neighborhoods(g, -1)

    def test_sampled_gnp_within_memory_bound(self):
        el = random_directed_gnp(500, 0.05, seed=9)
        g = to_bipartite(el)
        eps = Fraction(3, 5)
        k = 3450  # large enough that the rate is a real probability
        p1 = sampling_rate(g.n, eps, k)
        assert p1 < 1.0
        t = 2
        bound = (36 * math.log(g.n) / float(eps) ** 2 * alpha_for(g.n, eps)) ** t
        for seed in range(3):
            sampled = sample_edges(g, p1, np.random.default_rng(seed))
            peak = audit_neighborhoods(sampled, t)
            assert 1 <= peak <= min(bound, g.n)


class TestRunMpc:
    def test_clique_recovers_optimum(self):
        g = to_bipartite(bidirected_clique(4))
        res = run_mpc(g, MpcParams(EPS, 0.5, seed=3))
        assert res.density == DensityValue(3.0, 12, 4, 4)
        assert res.pair == VertexPair(range(4), range(4))

    def test_tracks_peel_reference_on_gnp(self):
        el = random_directed_gnp(200, 0.1, seed=3)
        g = to_bipartite(el)
        ref = peel_grid(g, Fraction(3, 5))
        res = run_mpc(g, MpcParams(Fraction(3, 5), 0.6, seed=5))
        assert density_meets(
            res.density.edge_count,
            res.density.s_size,
            res.density.t_size,
            ref.density.edge_count,
            ref.density.s_size,
            ref.density.t_size,
            2 * Fraction(8, 5) ** 6,
        )

    def test_approximation_on_small_corpus(self, corpus_bip, corpus_oracle):
        factor = 2 * Fraction(6, 5) ** 6
        for g, (_, opt) in list(zip(corpus_bip, corpus_oracle))[:25]:
            for seed in (0, 1):
                res = run_mpc(g, MpcParams(EPS, 0.5, seed=seed))
                assert density_meets(
                    res.density.edge_count,
                    res.density.s_size,
                    res.density.t_size,
                    opt.edge_count,
                    opt.s_size,
                    opt.t_size,
                    factor,
                )

    def test_round_ledger_accounting(self):
        g = to_bipartite(uniform_random_stream(12, 80, seed=4))
        params = MpcParams(EPS, 0.5, seed=2)
        res = run_mpc(g, params)
        cost = params.accounting.phase_cost(res.t_steps)
        assert all(row.rounds == cost for row in res.rows)
        per_cell: dict = {}
        for row in res.rows:
            key = (row.d_idx, row.z_idx)
            per_cell[key] = per_cell.get(key, 0) + row.rounds
        assert res.rounds_total == max(per_cell.values())
        assert res.machine_words == math.ceil(g.n**0.5)

    def test_identical_seed_reproduces(self):
        g = to_bipartite(uniform_random_stream(15, 90, seed=6))
        params = MpcParams(Fraction(1, 2), 0.5, seed=9)
        a = run_mpc(g, params, keep_pairs=True)
        b = run_mpc(g, params, keep_pairs=True)
        assert a.pair == b.pair and a.density == b.density
        assert a.rows == b.rows
        assert a.potential_pairs == b.potential_pairs
        assert a.rounds_total == b.rounds_total

    def test_kept_pairs_recorded_verbatim(self):
        g = to_bipartite(uniform_random_stream(15, 90, seed=6))
        res = run_mpc(g, MpcParams(Fraction(1, 2), 0.5, seed=9), keep_pairs=True)
        assert res.potential_pairs
        for di, zi, phase, pair, dens in res.potential_pairs:
            cnt = pair_edge_count(
                g.edge_left, g.edge_right, pair, g.n_left, g.n_right
            )
            assert dens == DensityValue.from_counts(cnt, pair.s_size, pair.t_size)
            assert compare_density(res.density, dens) >= 0
        assert any(
            pair == res.pair for _, _, _, pair, _ in res.potential_pairs
        )

    def test_pairs_not_kept_by_default(self):
        g = to_bipartite(bidirected_clique(3))
        assert run_mpc(g, MpcParams(EPS, 0.5, seed=0)).potential_pairs == ()


def test_sampling_lemma_with_real_subsampling():
    # the acceptance-point parameters clamp p to 1; k = 1000 drives a true
    # coin flip per edge and the failure rate must still sit under the bound
    res = sampling_lemma_suite(n=1024, k=1000, epsilon=0.5, trials=1000, seed=1)
    assert res["details"]["p"] < 1.0
    assert res["ok"]
