"""Synthetic-instance constructors."""

import numpy as np
import pytest

from dirdense.fixtures import (
    acceptance_corpus,
    bidirected_clique,
    directed_complete_bipartite,
    make_peeling_adversary,
    planted_block,
    random_directed_gnp,
    uniform_random_stream,
)


def test_bidirected_clique_counts():
    el = bidirected_clique(4)
    assert el.n_vertices == 4 and el.m == 12


def test_complete_bipartite_counts():
    el = directed_complete_bipartite(2, 3)
    assert el.n_vertices == 5 and el.m == 6
    assert set(zip(el.src.tolist(), el.dst.tolist())) == {
        (i, 2 + j) for i in range(2) for j in range(3)
    }


def test_adversary_smallest_legal():
    el = make_peeling_adversary(3, 0)
    # K3 plus a single bidirected pair
    assert el.m == 2 * 3 + 2


def test_adversary_no_extension():
    el = make_peeling_adversary(5, 0)
    assert el.m == 2 * (10 + 3)  # K5 plus a 3-clique, both sides of each edge


def test_adversary_extension_size():
    el = make_peeling_adversary(5, 3)
    assert el.n_vertices == 5 + 3 + 3  # clique + base + extension


def test_adversary_rejects_even_d():
    with pytest.raises(ValueError):
        make_peeling_adversary(4, 0)
    with pytest.raises(ValueError):
        make_peeling_adversary(1, 0)


def test_gnp_is_seed_deterministic():
    a = random_directed_gnp(30, 0.3, 5)
    b = random_directed_gnp(30, 0.3, 5)
    assert np.array_equal(a.src, b.src) and np.array_equal(a.dst, b.dst)
    assert not np.array_equal(a.src, random_directed_gnp(30, 0.3, 6).src)


def test_corpus_shape():
    graphs = acceptance_corpus()
    assert len(graphs) == 200
    assert all(8 <= g.n_vertices <= 12 for g in graphs)
    again = acceptance_corpus()
    assert all(
        np.array_equal(a.src, b.src) and np.array_equal(a.dst, b.dst)
        for a, b in zip(graphs, again)
    )


def test_uniform_stream_multigraph():
    el = uniform_random_stream(10, 500, 3)
    assert el.m == 500
    assert el.src.max() < 10 and el.dst.max() < 10


def test_planted_block_density_floor():
    el = planted_block(50, 8, 100, 2)
    pairs = set(zip(el.src.tolist(), el.dst.tolist()))
    block_pairs = {(u, v) for u in range(8) for v in range(8) if u != v}
    assert block_pairs <= pairs
