"""Shared fixtures: the seeded corpus and its (expensive) oracle answers."""

import pytest

from dirdense.fixtures import acceptance_corpus
from dirdense.graph import to_bipartite
from dirdense.oracle import exact_densest


@pytest.fixture(scope="session")
def corpus():
    return acceptance_corpus()


@pytest.fixture(scope="session")
def corpus_bip(corpus):
    return [to_bipartite(el) for el in corpus]


@pytest.fixture(scope="session")
def corpus_oracle(corpus_bip):
    # one brute-force sweep shared by every approximation criterion
    return [exact_densest(g) for g in corpus_bip]
