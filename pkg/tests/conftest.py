import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from algcon.graph import build_graph

settings.register_profile("algcon", deadline=None, derandomize=True, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("algcon")


def complete_graph(n, weight=1.0):
    return build_graph(n, [(i, j, weight) for i, j in itertools.combinations(range(n), 2)])


def random_graph(rng, n, p=0.5, connected=True):
    edges = []
    if connected:
        perm = rng.permutation(n)
        for k in range(1, n):
            a, b = int(perm[k]), int(perm[rng.integers(0, k)])
            edges.append((min(a, b), max(a, b)))
    pairs = set(edges)
    for i, j in itertools.combinations(range(n), 2):
        if (i, j) not in pairs and rng.random() < p:
            pairs.add((i, j))
    pairs = sorted(pairs)
    w = 1.0 - rng.random(len(pairs))
    return build_graph(n, [(i, j, float(x)) for (i, j), x in zip(pairs, w)])


@st.composite
def graphs(draw, min_n=2, max_n=12, connected=False):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    weights = draw(st.lists(st.floats(0.05, 5.0), min_size=len(pairs), max_size=len(pairs)))
    edges = [(i, j, w) for (i, j), keep, w in zip(pairs, mask, weights) if keep]
    if connected:
        present = {(i, j) for i, j, _ in edges}
        edges += [(k, k + 1, 1.0) for k in range(n - 1) if (k, k + 1) not in present]
    return build_graph(n, edges)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
