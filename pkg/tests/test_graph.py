"""Bipartite view, density arithmetic, and exact comparisons."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirdense.fixtures import bidirected_clique, directed_complete_bipartite
from dirdense.graph import (
    DensityValue,
    DirectedEdgeList,
    VertexPair,
    compare_density,
    density,
    pair_edge_count,
    to_bipartite,
)


def test_single_edge_bipartite():
    el = DirectedEdgeList.from_pairs([(0, 1)], n_vertices=2)
    g = to_bipartite(el)
    assert g.m == 1
    assert g.left_degrees()[0] == 1
    assert g.right_degrees()[1] == 1
    assert g.n == 4  # two copies per directed vertex


def test_k4_bipartite_degrees():
    g = to_bipartite(bidirected_clique(4))
    assert g.m == 12
    assert list(g.left_degrees()) == [3, 3, 3, 3]
    assert list(g.right_degrees()) == [3, 3, 3, 3]


def test_self_loop_maps_across_sides():
    el = DirectedEdgeList.from_pairs([(0, 0)], n_vertices=1)
    g = to_bipartite(el)
    assert g.m == 1
    assert g.left_degrees()[0] == 1 and g.right_degrees()[0] == 1


def test_density_complete_bipartite_2x2():
    el = directed_complete_bipartite(2, 2)
    g = to_bipartite(el)
    pair = VertexPair(np.array([0, 1]), np.array([2, 3]))
    assert density(g, pair).value == pytest.approx(2.0)


def test_density_k4_full_pair():
    g = to_bipartite(bidirected_clique(4))
    pair = VertexPair(np.arange(4), np.arange(4))
    d = density(g, pair)
    assert d.edge_count == 12
    assert d.value == pytest.approx(3.0)


def test_density_empty_side_is_zero():
    g = to_bipartite(bidirected_clique(3))
    assert density(g, VertexPair.empty()).value == 0.0
    assert density(g, VertexPair(np.array([], dtype=np.int64), np.array([0]))).value == 0.0


def test_duplicate_edges_counted():
    el = DirectedEdgeList.from_pairs([(0, 1), (0, 1), (0, 1)], n_vertices=2)
    g = to_bipartite(el)
    pair = VertexPair(np.array([0]), np.array([1]))
    assert density(g, pair).edge_count == 3
    assert density(g, pair).value == pytest.approx(3.0)


def test_compare_density_exact_tie():
    a = DensityValue.from_counts(2, 1, 4)  # 2/2
    b = DensityValue.from_counts(1, 1, 1)  # 1/1
    assert compare_density(a, b) == 0
    assert compare_density(DensityValue.from_counts(3, 1, 4), b) > 0
    assert compare_density(b, DensityValue.from_counts(3, 1, 4)) < 0


def test_pair_edge_count_matches_density():
    el = bidirected_clique(5)
    g = to_bipartite(el)
    pair = VertexPair(np.array([0, 1, 2]), np.array([1, 2, 3]))
    cnt = pair_edge_count(g.edge_left, g.edge_right, pair, g.n_left, g.n_right)
    assert cnt == density(g, pair).edge_count


edge_lists = st.lists(
    st.tuples(st.integers(0, 7), st.integers(0, 7)), min_size=0, max_size=40
)


@settings(max_examples=200, deadline=None)
@given(pairs=edge_lists)
def test_to_bipartite_preserves_edge_count(pairs):
    el = DirectedEdgeList.from_pairs(pairs, n_vertices=8)
    assert to_bipartite(el).m == len(pairs)


@settings(max_examples=200, deadline=None)
@given(pairs=edge_lists, seed=st.integers(0, 2**32 - 1))
def test_density_invariant_under_relabeling(pairs, seed):
    el = DirectedEdgeList.from_pairs(pairs, n_vertices=8)
    g = to_bipartite(el)
    rng = np.random.default_rng(seed)
    perm = rng.permutation(8)
    relabeled = DirectedEdgeList(
        perm[el.src].astype(np.int32), perm[el.dst].astype(np.int32), 8
    )
    g2 = to_bipartite(relabeled)
    lefts = rng.choice(8, size=3, replace=False)
    rights = rng.choice(8, size=2, replace=False)
    p1 = VertexPair(np.sort(lefts), np.sort(rights))
    p2 = VertexPair(np.sort(perm[lefts]), np.sort(perm[rights]))
    d1, d2 = density(g, p1), density(g2, p2)
    assert d1.edge_count == d2.edge_count
    assert math.isclose(d1.value, d2.value)
