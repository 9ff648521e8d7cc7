"""The subset-enumeration oracle against a dumber, fully independent one."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirdense.fixtures import bidirected_clique, make_peeling_adversary, random_directed_gnp
from dirdense.graph import DirectedEdgeList, VertexPair, density, to_bipartite
from dirdense.oracle import SizeCapExceeded, exact_densest


def naive_densest(g):
    """Plain double loop over all non-empty subset pairs; returns (cnt, s, t).

    Written without reference to the production oracle: edge membership by
    counting, argmax by exact cross-multiplication.
    """
    edges = list(zip(g.edge_left.tolist(), g.edge_right.tolist()))
    best = (0, 1, 1)  # cnt, |S|, |T|
    for s_size in range(1, g.n_left + 1):
        for S in itertools.combinations(range(g.n_left), s_size):
            s_set = set(S)
            for t_size in range(1, g.n_right + 1):
                for T in itertools.combinations(range(g.n_right), t_size):
                    t_set = set(T)
                    cnt = sum(1 for u, v in edges if u in s_set and v in t_set)
                    # cnt/sqrt(st) > best ?
                    if cnt * cnt * best[1] * best[2] > best[0] * best[0] * s_size * t_size:
                        best = (cnt, s_size, t_size)
    return best


@pytest.mark.parametrize("n,p,seed", [(4, 0.4, 0), (5, 0.5, 1), (5, 0.8, 2), (4, 0.9, 3)])
def test_oracle_matches_naive(n, p, seed):
    g = to_bipartite(random_directed_gnp(n, p, seed))
    _, dens = exact_densest(g)
    cnt, s, t = naive_densest(g)
    assert dens.edge_count * dens.edge_count * s * t == cnt * cnt * dens.s_size * dens.t_size


def test_out_star():
    el = DirectedEdgeList.from_pairs([(0, 1), (0, 2)], n_vertices=3)
    pair, dens = exact_densest(to_bipartite(el))
    assert pair.s_size == 1 and pair.t_size == 2
    assert dens.value == pytest.approx(2 / math.sqrt(2))


def test_single_edge():
    el = DirectedEdgeList.from_pairs([(0, 1)], n_vertices=2)
    _, dens = exact_densest(to_bipartite(el))
    assert dens.value == pytest.approx(1.0)


def test_k4_full_pair():
    pair, dens = exact_densest(to_bipartite(bidirected_clique(4)))
    assert dens.value == pytest.approx(3.0)
    assert pair.s_size == 4 and pair.t_size == 4


def test_cap_enforced():
    g = to_bipartite(random_directed_gnp(15, 0.2, 0))
    with pytest.raises(SizeCapExceeded):
        exact_densest(g)


def test_oracle_dominates_every_pair():
    g = to_bipartite(random_directed_gnp(6, 0.5, 7))
    _, dens = exact_densest(g)
    rng = np.random.default_rng(0)
    for _ in range(50):
        s = rng.choice(6, size=rng.integers(1, 7), replace=False)
        t = rng.choice(6, size=rng.integers(1, 7), replace=False)
        d = density(g, VertexPair(np.sort(s), np.sort(t)))
        assert dens.value >= d.value - 1e-12


def test_adversary_components_density():
    # dense block answer D-1; the eroding chain stays strictly below it
    for d_param, extra in [(5, 3), (7, 5)]:
        el = make_peeling_adversary(d_param, extra)
        g = to_bipartite(el)
        clique = VertexPair(np.arange(d_param), np.arange(d_param))
        assert density(g, clique).value == pytest.approx(d_param - 1)
        rest = np.arange(d_param, el.n_vertices)
        chain_el = DirectedEdgeList(
            *_induce(el, set(rest.tolist())), n_vertices=el.n_vertices
        )
        if chain_el.m:
            _, chain_best = exact_densest(to_bipartite(_compact(chain_el)))
            assert chain_best.value < d_param - 1


def _induce(el, keep):
    mask = np.array([u in keep and v in keep for u, v in zip(el.src, el.dst)])
    return el.src[mask], el.dst[mask]


def _compact(el):
    ids = np.unique(np.concatenate([el.src, el.dst]))
    remap = {int(v): i for i, v in enumerate(ids)}
    src = np.array([remap[int(u)] for u in el.src], dtype=np.int32)
    dst = np.array([remap[int(v)] for v in el.dst], dtype=np.int32)
    return DirectedEdgeList(src, dst, len(ids))


@settings(max_examples=60, deadline=None)
@given(
    pairs=st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), max_size=20),
)
def test_oracle_agrees_with_naive_on_random_multigraphs(pairs):
    el = DirectedEdgeList.from_pairs(pairs, n_vertices=5)
    g = to_bipartite(el)
    _, dens = exact_densest(g)
    cnt, s, t = naive_densest(g)
    assert dens.edge_count * dens.edge_count * s * t == cnt * cnt * dens.s_size * dens.t_size
