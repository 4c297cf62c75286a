import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynsparse.graph import (
    DELETED, INSERTED, DynamicGraph, NonPositiveWeight, SelfLoop, UnknownEdge, WeightRatioExceeded, replay,
)


def test_first_insert_gets_id_zero():
    g = DynamicGraph(2)
    rec = g.insert_edge(0, 1, 1.0)
    assert rec.id == 0 and g.m == 1


def test_parallel_edges_keep_distinct_ids():
    g = DynamicGraph(2)
    a = g.insert_edge(0, 1, 1.0)
    b = g.insert_edge(0, 1, 1.0)
    assert a.id != b.id and g.m == 2


def test_self_loop_and_weight_rejected():
    g = DynamicGraph(2)
    with pytest.raises(SelfLoop):
        g.insert_edge(0, 0, 1.0)
    with pytest.raises(NonPositiveWeight):
        g.insert_edge(0, 1, 0.0)
    with pytest.raises(NonPositiveWeight):
        g.insert_edge(0, 1, -2.0)


def test_delete_and_double_delete():
    g = DynamicGraph(2)
    rec = g.insert_edge(0, 1, 1.0)
    g.delete_edge(rec.id)
    assert g.m == 0
    with pytest.raises(UnknownEdge):
        g.delete_edge(rec.id)


def test_delete_one_of_two_parallel():
    g = DynamicGraph(2)
    a = g.insert_edge(0, 1, 1.0)
    b = g.insert_edge(0, 1, 2.0)
    g.delete_edge(a.id)
    assert list(g.edges) == [b.id]


def test_delete_uv_takes_smallest_id():
    g = DynamicGraph(3)
    g.insert_edge(1, 2, 1.0)
    a = g.insert_edge(0, 1, 1.0)
    g.insert_edge(1, 0, 3.0)
    assert g.delete_uv(1, 0).id == a.id


def test_snapshot_is_frozen():
    g = DynamicGraph(3)
    g.insert_edge(0, 1, 1.0)
    view = g.snapshot()
    g.insert_edge(1, 2, 1.0)
    assert view.m == 1 and g.m == 2
    assert DynamicGraph(4).snapshot().m == 0


def test_snapshot_replay_roundtrip():
    g = DynamicGraph(5)
    for u, v, w in [(0, 1, 2.0), (1, 2, 3.5), (0, 4, 1.0), (2, 3, 7.0)]:
        g.insert_edge(u, v, w)
    g.delete_edge(1)
    h = DynamicGraph(5)
    for e in g.snapshot().edges:
        h.insert_edge(e.u, e.v, e.w)
    key = lambda gr: sorted((min(e.u, e.v), max(e.u, e.v), e.w) for e in gr.edges.values())
    assert key(g) == key(h)


def test_version_counts_mutations():
    g = DynamicGraph(3)
    g.insert_edge(0, 1, 1.0)
    g.insert_edge(1, 2, 1.0)
    g.delete_edge(0)
    assert g.version == 3


def test_weight_ratio_cap():
    g = DynamicGraph(2)
    g.insert_edge(0, 1, 1.0)
    with pytest.raises(WeightRatioExceeded):
        g.insert_edge(0, 1, 2.0 ** 11)


ops = st.lists(
    st.one_of(
        st.tuples(st.just("I"), st.integers(0, 5), st.integers(0, 5), st.floats(0.5, 100.0)),
        st.tuples(st.just("D"), st.integers(0, 40)),
    ),
    max_size=60,
)


@settings(max_examples=80, deadline=None)
@given(ops)
def test_event_stream_replays_and_bounds_track(seq):
    g = DynamicGraph(6, max_ratio=None)
    log = []
    g.subscribe(log.append)
    for op in seq:
        if op[0] == "I":
            if op[1] == op[2]:
                continue
            g.insert_edge(op[1], op[2], op[3])
        elif op[1] in g.edges:
            g.delete_edge(op[1])
    assert [ev.kind for ev in log].count(INSERTED) - [ev.kind for ev in log].count(DELETED) == g.m
    h = replay(6, log, max_ratio=None)
    assert sorted(h.edges.values(), key=lambda e: e.id) == sorted(g.edges.values(), key=lambda e: e.id)
    ws = [e.w for e in g.edges.values()]
    assert g.max_weight == (max(ws) if ws else None)
    assert g.min_weight == (min(ws) if ws else None)
    for u in range(6):
        assert g.degree(u) == sum(1 for e in g.edges.values() if u in (e.u, e.v))
