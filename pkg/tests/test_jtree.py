import math
import random

import numpy as np
import pytest

from dynsparse import oracles
from dynsparse.graph import DynamicGraph, EdgeRecord, GraphView, UnknownEdge
from dynsparse.jtree import (
    ADAPTIVE, OBLIVIOUS, CutDecomposition, SkeletonTreeIndex, build_decomposition, compute_tcf, jt_add_terminal,
    jt_update_edge, lmax, min_cut_query, mwu_cut_decomposition, route, sample_indices, skeleton_vertices,
)
from dynsparse.lsst import DisconnectedInput, RootedForest

from conftest import random_connected


def cut_matrix(view, masks):
    """Cut weights of many vertex subsets at once (masks: bool array, one row per subset)."""
    total = np.zeros(masks.shape[0])
    for e in view.edges:
        total += e.w * (masks[:, e.u] != masks[:, e.v])
    return total


def all_masks(n):
    idx = np.arange(1, 2 ** n - 1)
    return ((idx[:, None] >> np.arange(n)) & 1).astype(bool)


def random_masks(n, k, rng):
    out = np.zeros((k, n), dtype=bool)
    for r in range(k):
        size = rng.randint(1, n - 1)
        out[r, rng.sample(range(n), size)] = True
    return out


def assert_dominates(g_view, jt, masks):
    cg = cut_matrix(g_view, masks)
    ch = cut_matrix(jt.as_view(), masks)
    assert np.all(cg <= ch * (1 + 1e-9) + 1e-9)


def build(view, j):
    tcf = compute_tcf(view, j)
    return tcf, route(view, tcf.tree, tcf.C, tcf.F)


# -- compute_tcf ----------------------------------------------------------------

def test_tree_input_partition():
    rng = random.Random(1)
    g = GraphView.from_triples(30, [(i, rng.randrange(i), rng.uniform(1, 5)) for i in range(1, 30)])
    tcf, jt = build(g, 6)
    assert sorted(tcf.tree) == sorted(e.id for e in g.edges)
    assert jt.check_partition()
    got, want = jt.as_view().aggregated(), g.aggregated()
    assert got.keys() == want.keys()
    assert all(got[k] == pytest.approx(want[k], rel=1e-12) for k in want)


def test_unit_four_cycle():
    g = GraphView.from_triples(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)])
    tcf, jt = build(g, 4)
    assert jt.check_partition()
    assert tcf.F <= set(tcf.tree)


@pytest.mark.parametrize("seed", range(3))
def test_random_partition_and_core_size(seed):
    g = random_connected(100, 300, seed)
    for j in (10, 25, 50):
        tcf, jt = build(g, j)
        assert jt.check_partition()
        assert len(tcf.C) <= 8 * j
        assert skeleton_vertices(tcf.forest, tcf.C) == tcf.C


def test_disconnected_rejected():
    g = GraphView.from_triples(4, [(0, 1, 1.0), (2, 3, 1.0)])
    with pytest.raises(DisconnectedInput):
        compute_tcf(g, 2)


# -- route ------------------------------------------------------------------------

def test_chord_maps_to_core_edge():
    # T = path 0-1-2, C = {0, 2}; F must split the path, so F = {(1, 2)}
    g = GraphView.from_triples(3, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)])
    jt = route(g, [0, 1], {0, 2}, {1})
    assert jt.check_partition()
    assert jt.core_weight((0, 2)) >= 3.0


@pytest.mark.parametrize("seed", range(4))
def test_route_dominates_exhaustive(seed):
    n = 10
    g = random_connected(n, 20, seed)
    _, jt = build(g, 3)
    assert_dominates(g, jt, all_masks(n))


def test_triangle_with_leaf_core_cut():
    g = GraphView.from_triples(4, [(0, 1, 1), (1, 2, 1), (0, 2, 1), (0, 3, 5)])
    jt = route(g, [0, 2, 3], {0, 1, 2}, {0, 2})
    H = jt.as_view()
    assert oracles.cut_weight(H, jt.expand({0})) == 2
    for extra in ([], [3]):
        assert oracles.cut_weight(H, {0, *extra}) >= 2


# -- AddTerminal / updates --------------------------------------------------------

def _path_jtree(e_rule):
    g = GraphView.from_triples(5, [(0, 1, 4.0), (1, 2, 1.0), (2, 3, 3.0), (3, 4, 2.0)])
    return route(g, [0, 1, 2, 3], {0}, set(), e_rule=e_rule)


@pytest.mark.parametrize("rule,cut_edge", [("min", 1), ("max", 0)])
def test_add_terminal_on_path(rule, cut_edge):
    jt = _path_jtree(rule)
    assert jt_add_terminal(jt, 0) == []
    jt_add_terminal(jt, 2)
    assert jt.F == {cut_edge}
    assert jt.check_partition()
    assert jt.comp_of[2] != jt.comp_of[0]
    assert jt_add_terminal(jt, 2) == []


@pytest.mark.parametrize("seed", range(3))
def test_add_terminal_keeps_dominance(seed):
    n = 40
    g = random_connected(n, 100, seed)
    _, jt = build(g, 8)
    rng = random.Random(seed)
    for u in rng.sample(range(n), 15):
        jt_add_terminal(jt, u)
        assert jt.check_partition()
        assert_dominates(g, jt, random_masks(n, 10, rng))
    # the dynamic structure equals a fresh Route on the final (C, F)
    fresh = route(g, sorted(jt.tree), jt.C, jt.F)
    assert sorted((e.u, e.v, round(e.w, 9)) for e in jt.as_view().edges) == \
        sorted((e.u, e.v, round(e.w, 9)) for e in fresh.as_view().edges)


def test_insert_between_core_vertices():
    g = random_connected(20, 40, 2)
    _, jt = build(g, 5)
    a, b = sorted(jt.C)[:2]
    rec = EdgeRecord(1000, a, b, 2.5)
    ch = jt_update_edge(jt, "I", rec)
    assert len(ch) == 1 and (ch[0].a, ch[0].b) == (a, b)
    assert ch[0].new - ch[0].old == pytest.approx(2.5)


def test_insert_delete_roundtrip():
    n = 30
    g = random_connected(n, 70, 3)
    _, jt = build(g, 6)
    non_core = [v for v in range(n) if v not in jt.C]
    u, v = non_core[0], non_core[-1]
    rec = EdgeRecord(999, u, v, 4.0)
    jt_update_edge(jt, "I", rec)
    after_promotion = {k: dict(d) for k, d in jt.core.items()}
    after_promotion[(min(u, v), max(u, v))].pop(999)
    jt_update_edge(jt, "D", rec)
    now = {k: d for k, d in jt.core.items() if d}
    assert now == {k: d for k, d in after_promotion.items() if d}
    rng = random.Random(3)
    assert_dominates(g, jt, random_masks(n, 10, rng))


def test_delete_envelope_edge_promotes():
    n = 30
    g = random_connected(n, 70, 4)
    _, jt = build(g, 4)
    env = [e for e in g.edges if e.u not in jt.C and e.v not in jt.C]
    assert env
    ch = jt_update_edge(jt, "D", env[0])
    assert env[0].u in jt.C and env[0].v in jt.C
    assert ch
    with pytest.raises(UnknownEdge):
        jt_update_edge(jt, "D", env[0])


def test_skeleton_index_matches_static():
    rng = random.Random(6)
    n = 40
    edges = [(i, rng.randrange(i), i - 1, 1.0) for i in range(1, n)]
    idx = SkeletonTreeIndex(n, edges, [0])
    forest = RootedForest.build(n, edges)
    C = {0}
    for u in rng.sample(range(1, n), 15):
        new, _ = idx.add(u)
        C.add(u)
        assert len(set(new) - {u}) <= 2
        assert idx.skel == skeleton_vertices(forest, C)
        C = set(idx.skel)


# -- decompositions and queries ----------------------------------------------------

def test_tree_decomposition_single_member():
    rng = random.Random(4)
    g = GraphView.from_triples(25, [(i, rng.randrange(i), rng.uniform(1, 9)) for i in range(1, 25)])
    res = mwu_cut_decomposition(g, 5)
    assert res.iterations == 1 and res.lam == [1.0]
    dec = build_decomposition(g, j=5)
    for _ in range(10):
        s, t = rng.sample(range(25), 2)
        assert min_cut_query(dec, s, t) == pytest.approx(oracles.min_cut_value(g, s, t), rel=1e-9)


def test_members_dominate_random_cuts():
    n = 40
    g = random_connected(n, 120, 7, 1, 1)
    res = mwu_cut_decomposition(g, 12)
    rng = random.Random(7)
    assert math.fsum(res.lam) == pytest.approx(1.0, abs=1e-12)
    for jt in res.trees:
        assert_dominates(g, jt, random_masks(n, 20, rng))


def test_upper_bound_fifty_pairs():
    n = 40
    g = random_connected(n, 120, 8, 1, 1)
    dec = build_decomposition(g, seed=8)
    rng = random.Random(8)
    good = 0
    for _ in range(50):
        s, t = rng.sample(range(n), 2)
        opt = oracles.min_cut_value(g, s, t)
        est = min_cut_query(dec, s, t)
        assert est >= opt * (1 - 1e-9)
        good += est <= 2 * dec.rho_emp * opt * (1 + 1e-9)
    assert good >= 48


@pytest.mark.parametrize("mode", [OBLIVIOUS, ADAPTIVE])
def test_trace_replay_sandwich(mode):
    n = 40
    rng = random.Random(11)
    view = random_connected(n, 100, 11, 1, 5)
    g = DynamicGraph(n, max_ratio=None)
    for e in view.edges:
        g.insert_edge(e.u, e.v, e.w)
    dec = CutDecomposition(g, mode=mode, seed=11)
    for step in range(300):
        if step % 10 == 9:
            s, t = rng.sample(range(n), 2)
            val, side = dec.query(s, t, want_cut=True)
            opt = oracles.min_cut_value(g.snapshot(), s, t)
            assert val >= opt * (1 - 1e-9)
            assert s in side and t not in side
            assert oracles.cut_weight(g.snapshot(), side) <= val * (1 + 1e-9)
        elif rng.random() < 0.5 and g.m > n:
            dec.delete(rng.choice(sorted(g.edges)))
        else:
            dec.insert(*rng.sample(range(n), 2), rng.uniform(1, 5))
    assert dec.builds >= 2


def test_sample_indices_deterministic():
    lam = [0.5, 0.25, 0.25]
    a = sample_indices(lam, 5, random.Random(1))
    b = sample_indices(lam, 5, random.Random(1))
    assert a == b and set(a) <= {0, 1, 2}


def test_lmax_bounds():
    x = [0.3, 2.0, -1.0, 1.5]
    assert max(x) <= lmax(x) <= max(x) + math.log(len(x))
