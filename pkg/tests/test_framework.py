import math
import random

import pytest

from dynsparse import oracles
from dynsparse.framework import (
    DISTANCE, FULLY_DYNAMIC, INCREMENTAL, CapacityExceeded, Hierarchy, HierarchyConfig, IdentitySparsifier,
    WrongMode, choose_level_sizes, hierarchy_delete, hierarchy_insert, hierarchy_query,
)
from dynsparse.graph import DynamicGraph, UnknownEdge
from dynsparse.schur import SchurSparsifier
from dynsparse.tz import TzIvs

from conftest import dynamic_from, random_connected


def test_level_sizes():
    assert choose_level_sizes(64, 1) == [64, 8]
    assert choose_level_sizes(10 ** 6, 2) == [10 ** 6, 10 ** 4, 10 ** 2]
    m = 1000
    assert choose_level_sizes(m, 1, FULLY_DYNAMIC, e=2) == [m, math.ceil(m ** (2 / 3) - 1e-9)]
    mu = choose_level_sizes(5000, 3)
    assert all(a >= b for a, b in zip(mu, mu[1:]))


def test_identity_level_equals_graph():
    g = dynamic_from(random_connected(10, 20, 1))
    h = Hierarchy(g, HierarchyConfig(1, [20, 5]), lambda i: IdentitySparsifier())
    assert sorted((e.u, e.v, e.w) for e in h.top().edges) == sorted((e.u, e.v, e.w) for e in g.snapshot().edges)
    rec = hierarchy_insert(h, 0, 9, 0.5)
    assert h.top().m == 21
    assert rec.id in g.edges


def test_empty_two_levels():
    h = Hierarchy(DynamicGraph(5), HierarchyConfig(2, [1, 1, 1]), lambda i: TzIvs(2))
    assert all(l.d.graph.m == 0 for l in h.levels)


def test_rebuild_counter():
    # threshold 2 mu_1 = 4: the counter reaches it on the fourth event
    g = DynamicGraph(6)
    h = Hierarchy(g, HierarchyConfig(1, [4, 2]), lambda i: IdentitySparsifier())
    for k in range(3):
        h.insert(k, k + 1, 1.0)
    assert h.levels[0].rebuilds == 0 and h.levels[0].counter == 3
    h.insert(3, 4, 1.0)
    assert h.levels[0].rebuilds == 1 and h.levels[0].counter == 0
    assert h.rebuild_log == [(4, 1)]


def test_two_level_tz_r1_exact():
    view = random_connected(40, 90, 3)
    g = dynamic_from(view)
    h = Hierarchy(g, HierarchyConfig(2, choose_level_sizes(90, 2)), lambda i: TzIvs(1))
    rng = random.Random(3)
    for _ in range(15):
        s, t = rng.sample(range(40), 2)
        assert h.query(s, t) == pytest.approx(oracles.exact_distance(view, s, t), rel=1e-9)


def test_shortcut_insert_on_path():
    n = 12
    g = DynamicGraph(n)
    for i in range(n - 1):
        g.insert_edge(i, i + 1, 1.0)
    h = Hierarchy(g, HierarchyConfig(2, choose_level_sizes(n - 1, 2)), lambda i: TzIvs(1))
    hierarchy_insert(h, 0, n - 1, 1.0)
    assert hierarchy_query(h, 0, n - 1) == 1


def test_delete_needs_fully_dynamic():
    g = DynamicGraph(3)
    h = Hierarchy(g, HierarchyConfig(1, [1, 1]), lambda i: TzIvs(2))
    rec = h.insert(0, 1, 1.0)
    with pytest.raises(WrongMode):
        h.delete(rec.id)


def test_delete_from_empty():
    h = Hierarchy(DynamicGraph(3), HierarchyConfig(1, [1, 1], FULLY_DYNAMIC), lambda i: IdentitySparsifier())
    with pytest.raises(UnknownEdge):
        hierarchy_delete(h, 0)


def test_insert_then_delete_restores_answers():
    view = random_connected(15, 30, 4)
    g = dynamic_from(view)
    h = Hierarchy(g, HierarchyConfig(1, [30, 6], FULLY_DYNAMIC), lambda i: IdentitySparsifier())
    pairs = [(0, 14), (3, 9), (5, 11)]
    before = [h.query(s, t) for s, t in pairs]
    rec = h.insert(0, 14, 0.01)
    hierarchy_delete(h, rec.id)
    assert [h.query(s, t) for s, t in pairs] == before


def test_capacity_cap():
    g = dynamic_from(random_connected(30, 60, 2))
    h = Hierarchy(g, HierarchyConfig(1, [60, 8], recourse_cap=3), lambda i: TzIvs(1))
    with pytest.raises(CapacityExceeded):
        h.add_terminal(0)


@pytest.mark.parametrize("levels,bound", [(1, 3), (2, 9)])
def test_sandwich_tz_r2(levels, bound):
    view = random_connected(60, 150, 5)
    g = dynamic_from(view)
    h = Hierarchy(g, HierarchyConfig(levels, choose_level_sizes(150, levels)), lambda i: TzIvs(2))
    rng = random.Random(levels)
    for _ in range(20):
        s, t = rng.sample(range(60), 2)
        d = oracles.exact_distance(view, s, t)
        est = h.query(s, t)
        assert d * (1 - 1e-9) <= est <= bound * d * (1 + 1e-9)


def test_monotone_growth_between_rebuilds():
    view = random_connected(30, 60, 6)
    g = dynamic_from(view)
    h = Hierarchy(g, HierarchyConfig(1, [200, 100]), lambda i: TzIvs(2))
    seen = set(h.levels[0].d.graph.edges)
    rng = random.Random(0)
    for _ in range(30):
        s, t = rng.sample(range(30), 2)
        h.query(s, t)
        now = set(h.levels[0].d.graph.edges)
        assert seen <= now
        seen = now


def test_rebuild_matches_fresh_preprocess():
    view = random_connected(30, 70, 8)
    g = dynamic_from(view)
    h = Hierarchy(g, HierarchyConfig(1, [70, 4]), lambda i: TzIvs(2))
    rng = random.Random(8)
    for _ in range(12):
        h.query(*rng.sample(range(30), 2))
    assert h.levels[0].rebuilds >= 1
    T = sorted(h.levels[0].d.terminals)
    fresh = TzIvs(2).preprocess(dynamic_from(g.snapshot()), T)
    for a in T:
        for b in T:
            if a < b:
                x = oracles.exact_distance(h.top(), a, b)
                y = oracles.exact_distance(fresh.current_sparsifier(), a, b)
                assert x == pytest.approx(y, rel=1e-9)


def test_schur_dvs_mixed_trace():
    # single-level fully-dynamic hierarchy over the Schur sparsifier
    rng = random.Random(21)
    view = random_connected(30, 80, 21)
    g = dynamic_from(view)
    cfg = HierarchyConfig(1, [80, 20], FULLY_DYNAMIC)
    plugin = DISTANCE.__class__("er", lambda v, s, t: oracles.exact_effective_resistance(v, s, t), "min", math.inf)
    h = Hierarchy(g, cfg, lambda i: SchurSparsifier(0.3, 0.3, seed=21, rho=200), plugin)
    eps = 0.3
    good = total = 0
    for step in range(200):
        r = rng.random()
        if r < 0.2:
            s, t = rng.sample(range(30), 2)
            est = h.query(s, t)
            ref = oracles.exact_effective_resistance(g.snapshot(), s, t)
            total += 1
            good += abs(est / ref - 1) <= eps
        elif r < 0.6 and g.m > 40:
            eid = rng.choice(sorted(g.edges))
            rec = g.edges[eid]
            # keep the graph connected: only delete edges that leave it so
            rest = g.snapshot()
            rest = type(rest)(rest.n, [e for e in rest.edges if e.id != eid])
            if len(set(rest.components())) == 1:
                h.delete(rec.id)
        else:
            h.insert(*rng.sample(range(30), 2), rng.uniform(1, 10))
    assert total > 20
    assert good == total


def test_stats_report_branching():
    g = dynamic_from(random_connected(20, 40, 1))
    h = Hierarchy(g, HierarchyConfig(2, choose_level_sizes(40, 2)), lambda i: TzIvs(2))
    for s, t in [(0, 5), (3, 19), (7, 8)]:
        h.query(s, t)
    st = h.stats()
    assert len(st["branching"]) == 2 and all(b >= 0 for b in st["branching"])
    assert INCREMENTAL == h.config.mode
