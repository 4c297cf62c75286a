import random

import networkx as nx
import pytest

from dynsparse.graph import DynamicGraph, GraphView


def random_connected(n, m, seed, lo=1.0, hi=10.0, integral=False):
    """Connected G(n, m) with weights uniform in [lo, hi] (networkx for the topology)."""
    rng = random.Random(seed)
    s = seed
    while True:
        G = nx.gnm_random_graph(n, m, seed=s)
        if nx.is_connected(G):
            break
        s += 10_000
    trip = []
    for u, v in sorted(G.edges()):
        w = float(rng.randint(int(lo), int(hi))) if integral else rng.uniform(lo, hi)
        trip.append((u, v, w))
    return GraphView.from_triples(n, trip)


def dynamic_from(view):
    g = DynamicGraph(view.n, max_ratio=None)
    for e in view.edges:
        g.insert_edge(e.u, e.v, e.w)
    return g


def path_view(n, w=1.0):
    return GraphView.from_triples(n, [(i, i + 1, w) for i in range(n - 1)])


@pytest.fixture
def rng():
    return random.Random(1234)
