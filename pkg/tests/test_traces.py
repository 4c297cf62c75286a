import math

import pytest

from dynsparse import traces
from dynsparse.traces import (
    InfeasibleParameters, ModeMismatch, ParseError, RunConfig, gen_trace, parse, parse_sweep,
    run_trace, scaling_sweep,
)


def test_parse_basic():
    tr = parse("n 4 mode length\nI 0 1 2.5\n# comment\nQ 0 1\nD 0\nDUV 2 3\n")
    assert tr.n == 4 and tr.interp == "length"
    assert tr.ops == [("I", 0, 1, 2.5), ("Q", 0, 1), ("D", 0), ("DUV", 2, 3)]
    assert tr.lines == [2, 4, 5, 6]


@pytest.mark.parametrize("text,line", [
    ("n 3 mode length\nI 0 1 -1\n", 2),
    ("n 3 mode length\nI 0 3 1\n", 2),
    ("n 3 mode length\n\nX 0 1\n", 3),
    ("n 3 mode length\nQ 0\n", 2),
    ("n 3 mode weird\n", 1),
    ("I 0 1 1\n", 1),
    ("n 3 mode length\nI 1 1 1\n", 2),
    ("n 3 mode length\nD x\n", 2),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as ei:
        parse(text)
    assert ei.value.line == line


def test_empty_trace():
    with pytest.raises(ParseError):
        parse("")
    rep = run_trace(RunConfig("incremental"), "n 5 mode length\n")
    assert rep.queries == [] and rep.answer_lines() == []


def test_gen_path():
    text = gen_trace("path", 5)
    tr = parse(text)
    assert [op[0] for op in tr.ops] == ["I"] * 4


def test_gen_deterministic():
    a = gen_trace("random-gnm", 40, 120, 300, 0.1, seed=3)
    b = gen_trace("random-gnm", 40, 120, 300, 0.1, seed=3)
    assert a == b
    assert gen_trace("random-gnm", 40, 120, 300, 0.1, seed=4) != a


@pytest.mark.parametrize("seed", range(3))
def test_gen_gnm_valid(seed):
    tr = parse(gen_trace("random-gnm", 40, 120, 300, 0.1, seed=seed))
    q = sum(op[0] == "Q" for op in tr.ops)
    assert 10 <= q <= 50
    live, nid = set(), 0
    for op in tr.ops:
        if op[0] == "I":
            assert 1 <= op[3] <= 40 ** 2
            live.add(nid)
            nid += 1
        elif op[0] == "D":
            assert op[1] in live
            live.remove(op[1])


@pytest.mark.parametrize("kind", ["grid", "cycle-chords"])
def test_gen_other_kinds(kind):
    tr = parse(gen_trace(kind, 16, 24, 50, 0.2, seed=1))
    assert tr.n == 16 and tr.ops


def test_gen_infeasible():
    with pytest.raises(InfeasibleParameters):
        gen_trace("random-gnm", 4, 100)


def test_fixture_triangle():
    from importlib.resources import files
    text = files("dynsparse").joinpath("fixtures/triangle_er.trace").read_text()
    rep = run_trace(RunConfig("er", depth=0, oracle_check=True), text)
    assert rep.queries[0].estimate == pytest.approx(0.6667, abs=1e-3)


def test_mode_mismatch():
    text = "n 3 mode length\nI 0 1 1\nI 1 2 1\nQ 0 2\n"
    assert run_trace(RunConfig("incremental"), text).queries[0].estimate == 2.0
    with pytest.raises(ModeMismatch):
        run_trace(RunConfig("incremental"), text + "D 0\n")
    with pytest.raises(ModeMismatch):
        run_trace(RunConfig("mincut"), text)


def test_dead_edge_delete():
    with pytest.raises(ParseError):
        run_trace(RunConfig("apsp"), "n 3 mode length\nI 0 1 1\nD 0\nD 0\n")


@pytest.mark.parametrize("mode,interp,extra", [
    ("incremental", "length", {}),
    ("offline", "length", {"plugin": "distance"}),
    ("offline", "capacity", {"plugin": "flow"}),
    ("mincut", "capacity", {}),
    ("mincut-adaptive", "capacity", {}),
    ("apsp", "length", {}),
    ("er", "conductance", {}),
])
def test_modes_deterministic_and_checked(mode, interp, extra):
    dr = 0.0 if mode == "incremental" else 0.3
    text = gen_trace("random-gnm", 30, 70, 120, 0.2, seed=2, interp=interp, delete_rate=dr)
    a = run_trace(RunConfig(mode, seed=5, oracle_check=True, **extra), text)
    b = run_trace(RunConfig(mode, seed=5, **extra), text)
    assert a.answer_lines() == b.answer_lines()
    assert a.violations == 0
    assert all(q.oracle is not None for q in a.queries)
    assert "queries" in a.summary() and a.to_csv().startswith("idx,")


def test_emit_cut_lines():
    text = gen_trace("random-gnm", 20, 50, 60, 0.3, seed=1, interp="capacity")
    rep = run_trace(RunConfig("mincut", emit_cut=True), text)
    lines = rep.answer_lines()
    assert sum(l.startswith("CUT") for l in lines) == len(rep.queries)


def test_invariant_violation(monkeypatch):
    monkeypatch.setattr(traces._Runner, "query", lambda self, s, t: (0.5, None))
    with pytest.raises(traces.InvariantViolation):
        run_trace(RunConfig("incremental", oracle_check=True), "n 2 mode length\nI 0 1 1\nQ 0 1\n")


def test_ratio_edge_cases():
    q = traces.QueryRecord(0, 0, 1, math.inf, oracle=math.inf)
    assert q.ratio == 1.0
    assert traces.QueryRecord(0, 0, 1, 2.0, oracle=1.0).ratio == 2.0


def test_sweep_single_size():
    rows = parse_sweep(scaling_sweep("mincut", [200], ops=20))
    assert len(rows) == 1 and rows[0]["slope"] == ""
    assert rows[0]["mode"] == "mincut"


def test_sweep_two_sizes_slope():
    rows = parse_sweep(scaling_sweep("apsp", [200, 400], ops=20))
    u0, u1 = float(rows[0]["mean_update_us"]), float(rows[1]["mean_update_us"])
    want = math.log(u1 / u0) / math.log(400 / 200)
    # times are rounded to 3 decimals in the CSV
    assert float(rows[1]["slope"]) == pytest.approx(want, abs=0.05)


def test_sweep_rejects_descending():
    with pytest.raises(ValueError):
        scaling_sweep("er", [400, 200])
