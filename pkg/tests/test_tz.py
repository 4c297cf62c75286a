import itertools
import math
import random

import pytest

from dynsparse import oracles
from dynsparse.graph import GraphView
from dynsparse.tz import (
    EmptySetInCollection, QTooLarge, compute_bunches, det_hierarchy, greedy_hitting_set, source_detection,
    tz_add_terminal, tz_preprocess,
)

from conftest import path_view, random_connected


def test_source_detection_path_tie():
    lists, dists = source_detection(path_view(5), {0, 4}, 1)
    assert lists[2] == [0] and dists[2] == [2.0]


def test_source_detection_all_sources():
    g = random_connected(12, 20, 1)
    U = {1, 4, 7}
    lists, _ = source_detection(g, U, 3)
    assert all(sorted(l) == sorted(U) for l in lists)


def test_source_detection_star():
    g = GraphView.from_triples(6, [(0, i, 1.0) for i in range(1, 6)])
    lists, _ = source_detection(g, {1, 2, 3, 4, 5}, 2)
    assert lists[4] == [4, 1]


def test_source_detection_q_too_large():
    with pytest.raises(QTooLarge):
        source_detection(path_view(3), {0}, 2)
    with pytest.raises(QTooLarge):
        source_detection(path_view(3), {0}, 0)


def test_source_detection_matches_dijkstra():
    g = random_connected(30, 70, 4)
    U = set(range(0, 30, 3))
    lists, dists = source_detection(g, U, 4)
    full = {u: oracles.dijkstra(g, u) for u in U}
    for v in range(30):
        ref = sorted((full[u][v], u) for u in U)[:4]
        assert lists[v] == [u for _, u in ref]
        assert dists[v] == pytest.approx([d for d, _ in ref], rel=1e-12)


def test_hitting_set_example():
    U = range(1, 7)
    S = [{1, 2, 3}, {3, 4, 5}, {1, 5, 6}]
    T = greedy_hitting_set(U, S, 3)
    assert T == {1, 3}
    assert all(T & s for s in S)
    assert len(T) <= 2 * (1 + math.log(3))


def test_hitting_set_trivial_cases():
    assert greedy_hitting_set([4, 2, 9], [{4, 2, 9}]) == {2}
    assert greedy_hitting_set(range(5), [{0}, {3}, {4}], 1) == {0, 3, 4}
    with pytest.raises(EmptySetInCollection):
        greedy_hitting_set(range(3), [{0}, set()])


@pytest.mark.parametrize("seed", range(5))
def test_hitting_set_bound(seed):
    rng = random.Random(seed)
    U = list(range(60))
    s = 8
    S = [set(rng.sample(U, s)) for _ in range(40)]
    T = greedy_hitting_set(U, S, s)
    assert all(T & x for x in S)
    assert len(T) <= len(U) / s * (1 + math.log(len(S)))


def test_hierarchy_r1():
    h = det_hierarchy(path_view(6), 1)
    assert h.A == [set(range(6)), set()]


def test_hierarchy_containment_path():
    g = path_view(9)
    h = det_hierarchy(g, 2)
    assert len(h.A[1]) <= math.ceil(9 ** 0.5) + 1
    bunches = compute_bunches(g, h)
    for i, near in enumerate(h.near):
        for v in range(9):
            Bi = {w for w in bunches[v] if w in h.A[i] and w not in h.A[i + 1]}
            assert Bi <= set(near[v])


def test_hierarchy_sizes_r3():
    g = random_connected(100, 300, 2)
    h = det_hierarchy(g, 3)
    for i in range(4):
        assert len(h.A[i]) <= 100 ** (1 - i / 3) + 1e-9
    for i in range(3):
        assert h.A[i + 1] <= h.A[i]


def test_pivots_realize_set_distance():
    g = random_connected(40, 100, 6)
    h = det_hierarchy(g, 3)
    for i in range(3):
        if not h.A[i]:
            continue
        for v in range(40):
            ref = min(oracles.dijkstra(g, a)[v] for a in h.A[i])
            assert h.dist[i][v] == pytest.approx(ref, rel=1e-12)
            assert h.pivot[i][v] in h.A[i]
            assert oracles.dijkstra(g, h.pivot[i][v])[v] == pytest.approx(ref, rel=1e-12)


def test_r1_bunch_is_everything():
    g = random_connected(15, 30, 3)
    ivs = tz_preprocess(g, 1)
    for v in range(15):
        d = oracles.dijkstra(g, v)
        assert set(ivs.bunches[v]) == set(range(15))
        for w, dw in ivs.bunches[v].items():
            assert dw == pytest.approx(d[w], rel=1e-12)


def test_tree_bunch_distances():
    rng = random.Random(8)
    trip = [(i, rng.randrange(i), rng.uniform(1, 5)) for i in range(1, 40)]
    g = GraphView.from_triples(40, trip)
    ivs = tz_preprocess(g, 3)
    for v in range(40):
        d = oracles.dijkstra(g, v)
        for w, dw in ivs.bunches[v].items():
            assert dw == pytest.approx(d[w], rel=1e-12)


def test_bunch_size_bound():
    n = 60
    ivs = tz_preprocess(random_connected(n, 150, 5), 2)
    assert max(ivs.bunch_size(v) for v in range(n)) <= 2 * 2 * n ** 0.5 * (1 + math.log(n))


def test_add_terminal_r1_path():
    ivs = tz_preprocess(path_view(3), 1)
    tz_add_terminal(ivs, 0)
    tz_add_terminal(ivs, 2)
    assert oracles.exact_distance(ivs.current_sparsifier(), 0, 2) == 2
    assert tz_add_terminal(ivs, 2) == []


@pytest.mark.parametrize("seed", range(3))
def test_add_terminal_stretch(seed):
    g = random_connected(60, 150, seed)
    ivs = tz_preprocess(g, 2)
    T = random.Random(seed).sample(range(60), 10)
    for u in T:
        added = tz_add_terminal(ivs, u)
        assert len(added) <= ivs.bunch_size(u)
    H = ivs.current_sparsifier()
    for a, b in itertools.combinations(T, 2):
        d = oracles.exact_distance(g, a, b)
        dh = oracles.exact_distance(H, a, b)
        assert d * (1 - 1e-9) <= dh <= 3 * d * (1 + 1e-9)


def test_deterministic():
    g = random_connected(50, 120, 11)
    a, b = tz_preprocess(g, 3), tz_preprocess(g, 3)
    assert a.hierarchy.A == b.hierarchy.A and a.bunches == b.bunches
    for u in (3, 17, 40):
        assert tz_add_terminal(a, u) == tz_add_terminal(b, u)
