import itertools

import pytest
from hypothesis import strategies as st

from fdsrank.digraph import Digraph


@st.composite
def digraphs(draw, min_n=1, max_n=4):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.product(range(1, n + 1), repeat=2))
    arcs = draw(st.sets(st.sampled_from(pairs)))
    return Digraph(n, frozenset(arcs))


def all_walks(D, p):
    walks = [(v,) for v in D.vertices]
    for _ in range(p):
        walks = [w + (v,) for w in walks for v in D.out_lists[w[-1] - 1]]
    return walks


def max_independent_walks(D, p):
    """Largest set of pairwise independent p-walks, by exhaustive search."""
    walks = all_walks(D, p)

    def independent(a, b):
        return all(x != y for x, y in zip(a, b))

    best = 0

    def extend(chosen, start):
        nonlocal best
        best = max(best, len(chosen))
        for i in range(start, len(walks)):
            if all(independent(walks[i], w) for w in chosen):
                extend(chosen + [walks[i]], i + 1)

    extend([], 0)
    return best


@pytest.fixture
def cycle4():
    return Digraph.cycle(4)


@pytest.fixture
def path3():
    return Digraph.path(3)


@pytest.fixture
def star():
    return Digraph(3, frozenset({(1, 2), (1, 3)}))
