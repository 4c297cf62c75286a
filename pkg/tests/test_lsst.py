import random

import pytest

from dynsparse.graph import GraphView
from dynsparse.lsst import RootedForest, generalized_lsst, replication, tree_of

from conftest import random_connected


def test_tree_input_returns_tree():
    rng = random.Random(2)
    trip = [(i, rng.randrange(i), rng.uniform(1, 9)) for i in range(1, 30)]
    g = GraphView.from_triples(30, trip)
    w = {e.id: rng.random() for e in g.edges}
    res = generalized_lsst(g, None, w)
    assert res.tree == sorted(e.id for e in g.edges)
    assert res.weighted_ratio == pytest.approx(1.0, rel=1e-12)


def test_hot_edge_on_cycle_kept():
    n = 20
    g = GraphView.from_triples(n, [(i, (i + 1) % n, 1.0) for i in range(n)])
    for hot in (0, 7, 19):
        w = {e.id: (1000.0 if e.id == hot else 1e-3) for e in g.edges}
        assert hot in generalized_lsst(g, None, w).tree


def test_uniform_weights_equal_plain():
    g = random_connected(30, 70, 5)
    a = generalized_lsst(g)
    b = generalized_lsst(g, None, {e.id: 3.0 for e in g.edges})
    assert a.tree == b.tree


def test_replication_formula():
    g = GraphView.from_triples(3, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)])
    lengths = {0: 1.0, 1: 2.0, 2: 3.0}
    weights = {0: 1.0, 1: 1.0, 2: 2.0}
    # w(G) = 1 + 2 + 6 = 9, |E| = 3
    assert replication(g, lengths, weights) == {0: 1, 1: 1 + 2 * 3 // 9, 2: 1 + 6 * 3 // 9}


@pytest.mark.parametrize("seed", range(3))
def test_spanning_and_certificate(seed):
    g = random_connected(50, 140, seed)
    rng = random.Random(seed)
    w = {e.id: rng.random() for e in g.edges}
    res = generalized_lsst(g, None, w)
    assert len(res.tree) == 49
    f = res.forest
    assert len({f.root[v] for v in range(50)}) == 1
    num = sum(f.distance(e.u, e.v) * w[e.id] for e in g.edges)
    den = sum(e.w * w[e.id] for e in g.edges)
    assert num / den == pytest.approx(res.weighted_ratio, rel=1e-9)


def test_rooted_forest_paths():
    f = RootedForest.build(6, [(0, 1, 0, 1.0), (1, 2, 1, 2.0), (1, 3, 2, 3.0), (4, 5, 3, 1.0)])
    assert f.lca(2, 3) == 1
    assert f.distance(2, 3) == 5.0
    assert f.path_vertices(2, 3) == [2, 1, 3]
    assert f.lca(0, 4) == -1
    t = tree_of(GraphView.from_triples(3, [(0, 1, 1.0), (1, 2, 1.0)]), [0, 1])
    assert t.distance(0, 2) == 2.0
