import itertools
import math
import random

import networkx as nx
import numpy as np
import pytest

from dynsparse import oracles
from dynsparse.graph import GraphView

from conftest import path_view, random_connected


def test_four_cycle_cut():
    g = GraphView.from_triples(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)])
    assert oracles.exact_min_cut(g, 0, 2).value == 2


def test_path_bottleneck():
    g = GraphView.from_triples(3, [(0, 1, 3.0), (1, 2, 5.0)])
    res = oracles.exact_min_cut(g, 0, 2)
    assert res.value == 3
    assert res.side == frozenset({0}) or set(res.side) == {0}


def test_disconnected_cut_is_zero():
    g = GraphView.from_triples(4, [(0, 1, 2.0), (2, 3, 1.0)])
    res = oracles.exact_min_cut(g, 0, 3)
    assert res.value == 0 and set(res.side) == {0, 1}


def _brute_cut(view, s, t):
    rest = [v for v in range(view.n) if v not in (s, t)]
    best = math.inf
    for mask in range(1 << len(rest)):
        side = {s} | {rest[i] for i in range(len(rest)) if mask >> i & 1}
        best = min(best, oracles.cut_weight(view, side))
    return best


@pytest.mark.parametrize("seed", range(5))
def test_min_cut_matches_enumeration(seed):
    g = random_connected(8, 16, seed, 1, 1)
    rng = random.Random(seed)
    s, t = rng.sample(range(8), 2)
    res = oracles.exact_min_cut(g, s, t)
    assert res.value == _brute_cut(g, s, t)
    assert s in res.side and t not in res.side
    assert oracles.cut_weight(g, res.side) == pytest.approx(res.value, rel=1e-12)


@pytest.mark.parametrize("seed", range(3))
def test_min_cut_matches_networkx_flow(seed):
    g = random_connected(40, 120, seed, 1, 20)
    G = nx.Graph()
    for (a, b), c in g.aggregated().items():
        G.add_edge(a, b, capacity=c)
    rng = random.Random(seed)
    for _ in range(5):
        s, t = rng.sample(range(40), 2)
        ref = nx.maximum_flow_value(G, s, t)
        assert oracles.min_cut_value(g, s, t) == pytest.approx(ref, rel=1e-9)


def test_distances_small():
    assert oracles.exact_distance(path_view(3), 0, 2) == 2
    g = GraphView.from_triples(4, [(0, 1, 1.0), (2, 3, 1.0)])
    assert oracles.exact_distance(g, 0, 3) == math.inf


def test_distances_match_bellman_ford():
    g = random_connected(50, 150, 7, 1, 30)
    G = nx.Graph()
    for e in g.edges:
        if not G.has_edge(e.u, e.v) or G[e.u][e.v]["weight"] > e.w:
            G.add_edge(e.u, e.v, weight=e.w)
    ref = nx.single_source_bellman_ford_path_length(G, 0)
    d = oracles.dijkstra(g, 0)
    for v in range(50):
        assert d[v] == pytest.approx(ref[v], rel=1e-12)


def test_triangle_and_series_resistance():
    tri = GraphView.from_triples(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
    for s, t in [(0, 1), (1, 2), (0, 2)]:
        assert oracles.exact_effective_resistance(tri, s, t) == pytest.approx(2 / 3, rel=1e-9)
    assert oracles.exact_effective_resistance(path_view(3), 0, 2) == pytest.approx(2.0, rel=1e-9)


def test_resistance_different_components():
    g = GraphView.from_triples(4, [(0, 1, 1.0), (2, 3, 1.0)])
    with pytest.raises(oracles.DifferentComponents):
        oracles.exact_effective_resistance(g, 0, 2)


def _tree_weight_sum(n, edges):
    """Sum over spanning trees of the product of conductances (brute force)."""
    total = 0.0
    for comb in itertools.combinations(edges, n - 1):
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ok = True
        for a, b, _ in comb:
            ra, rb = find(a), find(b)
            if ra == rb:
                ok = False
                break
            parent[ra] = rb
        if ok:
            total += math.prod(c for _, _, c in comb)
    return total


@pytest.mark.parametrize("seed", range(3))
def test_resistance_matrix_tree(seed):
    g = random_connected(7, 11, seed, 1, 5, integral=True)
    edges = [(e.u, e.v, e.w) for e in g.edges]
    rng = random.Random(seed)
    s, t = rng.sample(range(7), 2)
    # ER(s, t) = T(G with s and t merged) / T(G)
    relabel = lambda x: s if x == t else x
    merged = [(relabel(a), relabel(b), c) for a, b, c in edges if relabel(a) != relabel(b)]
    idx = {v: i for i, v in enumerate(sorted({x for e in merged for x in e[:2]} | {s}))}
    merged = [(idx[a], idx[b], c) for a, b, c in merged]
    ref = _tree_weight_sum(6, merged) / _tree_weight_sum(7, edges)
    assert oracles.exact_effective_resistance(g, s, t) == pytest.approx(ref, rel=1e-9)


def test_schur_path_middle():
    sc = oracles.exact_schur_complement(path_view(3), [0, 2])
    assert sc.matrix[0, 1] == pytest.approx(-0.5, rel=1e-12)


def test_schur_all_vertices_is_laplacian():
    g = random_connected(6, 9, 3)
    sc = oracles.exact_schur_complement(g, list(range(6)))
    assert np.allclose(sc.matrix, oracles.laplacian(g), rtol=1e-12, atol=1e-12)


def test_schur_nested():
    g = random_connected(12, 30, 5)
    C2 = [0, 1, 2, 3, 4, 5, 6]  # a prefix, so the SC view needs no relabelling
    C1 = [0, 2, 4]
    direct = oracles.exact_schur_complement(g, C1).matrix
    via = oracles.exact_schur_complement(oracles.exact_schur_complement(g, C2).to_view(len(C2)), C1).matrix
    assert np.allclose(direct, via, rtol=1e-9, atol=1e-9)


def test_schur_preserves_resistance():
    g = random_connected(15, 35, 9)
    C = [1, 3, 5, 7, 11]
    h = oracles.exact_schur_complement(g, C).to_view(15)
    for a, b in itertools.combinations(C, 2):
        assert oracles.exact_effective_resistance(h, a, b) == pytest.approx(
            oracles.exact_effective_resistance(g, a, b), rel=1e-9)


def test_schur_singular_block():
    g = GraphView.from_triples(4, [(0, 1, 1.0), (2, 3, 1.0)])
    with pytest.raises(oracles.SingularBlock):
        oracles.exact_schur_complement(g, [0, 1])
