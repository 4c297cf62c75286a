"""Generic vertex-sparsifier hierarchies.

A hierarchy keeps graphs G_0 (the input), G_1, ..., G_l where G_i is the
sparsifier maintained by a data structure D_i over G_{i-1}.  Updates to
G_{i-1} are pushed into D_i and the resulting edge changes of G_i become
the updates of level i+1.  Level i is rebuilt from scratch once its
counter reaches its threshold (2 mu_i by default), and every deeper level
is rebuilt with it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from . import oracles
from .graph import DELETED, INSERTED, ChangeEvent, DynamicGraph, GraphView, UnknownEdge


class CapacityExceeded(RuntimeError):
    pass


class WrongMode(RuntimeError):
    pass


INCREMENTAL = "incremental"
FULLY_DYNAMIC = "fully-dynamic"


# -- property plugins ------------------------------------------------------

@dataclass(frozen=True)
class PropertyPlugin:
    name: str
    static_solver: Callable
    direction: str  # "min" or "max": which way the sparsifier errs
    identity_value: float

    def better_of(self, a, b):
        return min(a, b) if self.direction == "min" else max(a, b)


def _dist_solver(view, s, t):
    return oracles.exact_distance(view, s, t)


def _cut_solver(view, s, t):
    return oracles.min_cut_value(view, s, t)


def _er_solver(view, s, t):
    if s == t:
        return 0.0
    return oracles.exact_effective_resistance(view, s, t)


# sparsifiers only ever overestimate distances and cut values, so the
# best of several estimates is the smallest one
DISTANCE = PropertyPlugin("distance", _dist_solver, "min", math.inf)
MIN_CUT = PropertyPlugin("mincut", _cut_solver, "min", math.inf)
RESISTANCE = PropertyPlugin("resistance", _er_solver, "min", math.inf)


# -- sparsifier contract -----------------------------------------------------

class _Recorder:
    def __init__(self, g: DynamicGraph):
        self.g = g
        self.events: list = []

    def __enter__(self):
        self.g.subscribe(self.events.append)
        return self.events

    def __exit__(self, *exc):
        self.g.unsubscribe(self.events.append)
        return False


class VertexSparsifier:
    """Base for incremental (IVS) and fully-dynamic (DVS) sparsifiers.

    The maintained sparsifier lives in ``self.graph`` (a DynamicGraph on the
    same vertex ids as the base graph).  Every operation returns the list of
    ChangeEvents it caused on ``self.graph``.  ``insert`` and ``delete`` are
    called after the base graph has already been mutated.
    """

    supports_delete = False

    def __init__(self):
        self.graph = None
        self.base = None
        self.terminals: set = set()
        self.recourse = 0
        self._direct: dict = {}

    def preprocess(self, base: DynamicGraph, terminals=()):
        raise NotImplementedError

    def _add_terminal(self, u):
        raise NotImplementedError

    def _promote(self, u):
        if u not in self.terminals:
            self._add_terminal(u)

    def add_terminal(self, u) -> list:
        if u in self.terminals:
            return []
        with _Recorder(self.graph) as ev:
            self._add_terminal(u)
        self.recourse += len(ev)
        return ev

    def insert(self, rec) -> list:
        # insertion through terminals: both endpoints become terminals and
        # the edge is copied into the sparsifier verbatim
        with _Recorder(self.graph) as ev:
            self._promote(rec.u)
            self._promote(rec.v)
            self._place_edge(rec)
        self.recourse += len(ev)
        return ev

    def _place_edge(self, rec):
        h = self.graph.insert_edge(rec.u, rec.v, rec.w)
        self._direct[rec.id] = h.id

    def delete(self, rec) -> list:
        raise WrongMode(f"{type(self).__name__} does not support deletions")

    def apply(self, ev: ChangeEvent) -> list:
        if ev.kind == INSERTED:
            return self.insert(ev.edge)
        return self.delete(ev.edge)

    def current_sparsifier(self) -> GraphView:
        return self.graph.snapshot()

    def current_terminals(self):
        return frozenset(self.terminals)


class IdentitySparsifier(VertexSparsifier):
    """H = G.  Quality 1, no terminal bookkeeping beyond the set itself."""

    supports_delete = True

    def preprocess(self, base, terminals=()):
        self.base = base
        self.graph = DynamicGraph(base.n, max_ratio=None)
        self._direct = {}
        for rec in sorted(base.edges.values(), key=lambda e: e.id):
            self._direct[rec.id] = self.graph.insert_edge(rec.u, rec.v, rec.w).id
        self.terminals = set()
        for u in terminals:
            self.add_terminal(u)
        return self

    def _add_terminal(self, u):
        self.terminals.add(u)

    def insert(self, rec):
        with _Recorder(self.graph) as ev:
            self.terminals.update((rec.u, rec.v))
            self._place_edge(rec)
        return ev

    def delete(self, rec):
        with _Recorder(self.graph) as ev:
            self.terminals.update((rec.u, rec.v))
            hid = self._direct.pop(rec.id, None)
            if hid is None:
                raise UnknownEdge(rec.id)
            self.graph.delete_edge(hid)
        return ev


# -- level sizes ---------------------------------------------------------------

def _ceil_pow(m, p):
    x = m ** p
    r = round(x)
    if abs(x - r) <= 1e-9 * max(1.0, x):
        return int(r)
    return int(math.ceil(x))


def choose_level_sizes(m: int, levels: int, profile: str = INCREMENTAL, e: float = 2.0, t=None) -> list:
    """mu_0 = m >= mu_1 >= ... >= mu_l.

    incremental:    mu_i = ceil(m^(1 - i/(l+1)))
    fully-dynamic:  mu_i = ceil(m^(1 - i/(l+t))), t = e*l unless given
    """
    if m < 1 or levels < 1:
        raise ValueError("need m >= 1 and levels >= 1")
    if profile == INCREMENTAL:
        denom = levels + 1
    elif profile == FULLY_DYNAMIC:
        if t is None:
            t = e * levels
        denom = levels + t
    else:
        raise ValueError(f"unknown profile {profile!r}")
    return [m] + [max(1, _ceil_pow(m, 1 - i / denom)) for i in range(1, levels + 1)]


# -- the hierarchy -------------------------------------------------------------

@dataclass
class HierarchyConfig:
    levels: int
    sizes: list  # mu_0..mu_l
    mode: str = INCREMENTAL
    rebuild_factor: float = 2.0
    recourse_cap: int = None
    # optional override: f(level, base_graph) -> rebuild threshold
    threshold_fn: Callable = None

    def __post_init__(self):
        if self.levels < 1:
            raise ValueError("levels must be >= 1")
        if len(self.sizes) != self.levels + 1:
            raise ValueError("sizes must have levels+1 entries")
        if any(a < b for a, b in zip(self.sizes, self.sizes[1:])):
            raise ValueError("sizes must be non-increasing")


@dataclass
class LevelState:
    d: VertexSparsifier
    counter: int = 0
    threshold: float = math.inf
    stamps: dict = field(default_factory=dict)
    rebuilds: int = 0
    changes_in: int = 0
    changes_out: int = 0


class Hierarchy:
    def __init__(self, graph: DynamicGraph, config: HierarchyConfig, factory, plugin: PropertyPlugin = DISTANCE):
        self.g = graph
        self.config = config
        self.factory = factory
        self.plugin = plugin
        self.clock = 0
        self.levels: list = []
        self.rebuild_log: list = []
        self.op_count = 0
        # vertices a rebuild must keep (the endpoints of a running query)
        self.pinned: set = set()
        for i in range(config.levels):
            self.levels.append(None)
        self._rebuild(0, initial=True)

    # level i (0-based) holds D_{i+1} over G_i
    def base_graph(self, i) -> DynamicGraph:
        return self.g if i == 0 else self.levels[i - 1].d.graph

    def top(self) -> GraphView:
        return self.levels[-1].d.current_sparsifier()

    def _threshold(self, i, base):
        if self.config.threshold_fn is not None:
            return self.config.threshold_fn(i + 1, base)
        return self.config.rebuild_factor * self.config.sizes[i + 1]

    def _rebuild(self, i, initial=False):
        for j in range(i, self.config.levels):
            old = self.levels[j]
            stamps = {} if old is None else old.stamps
            pins = [(u, stamps.get(u, 0)) for u in sorted(self.pinned)]
            rest = sorted((kv for kv in stamps.items() if kv[0] not in self.pinned), key=lambda kv: (-kv[1], kv[0]))
            keep = pins + rest[: max(0, self.config.sizes[j + 1] - len(pins))]
            keep.sort(key=lambda kv: (kv[1], kv[0]))
            base = self.base_graph(j)
            d = self.factory(j + 1)
            d.preprocess(base, [u for u, _ in keep])
            st = LevelState(d=d, stamps=dict(keep), threshold=self._threshold(j, base))
            if old is not None:
                st.rebuilds = old.rebuilds + 1
                st.changes_in, st.changes_out = old.changes_in, old.changes_out
            self.levels[j] = st
            if not initial:
                self.rebuild_log.append((self.op_count, j + 1))

    def _stamp(self, lvl, *vs):
        for v in vs:
            self.clock += 1
            lvl.stamps[v] = self.clock

    def _cascade(self, events, u=None):
        total = 0
        cap = self.config.recourse_cap
        for i, lvl in enumerate(self.levels):
            out = []
            for ev in events:
                ch = lvl.d.apply(ev)
                self._stamp(lvl, ev.edge.u, ev.edge.v)
                lvl.changes_in += 1
                lvl.changes_out += len(ch)
                out.extend(ch)
                lvl.counter += 1
                total += len(ch)
                if cap is not None and total > cap:
                    raise CapacityExceeded(f"recourse {total} > cap {cap} at level {i + 1}")
                if lvl.counter >= lvl.threshold:
                    self._rebuild(i)
                    lvl = self.levels[i]
                    out = []
                    break
            if u is not None:
                ch = lvl.d.add_terminal(u)
                self._stamp(lvl, u)
                lvl.changes_out += len(ch)
                out.extend(ch)
                lvl.counter += 1
                total += len(ch)
                if cap is not None and total > cap:
                    raise CapacityExceeded(f"recourse {total} > cap {cap} at level {i + 1}")
                if lvl.counter >= lvl.threshold:
                    self._rebuild(i)
                    out = []
            events = out
        return total

    # -- public operations -------------------------------------------------
    def insert(self, u, v, w):
        self.op_count += 1
        rec = self.g.insert_edge(u, v, w)
        self._cascade([ChangeEvent(INSERTED, rec)])
        return rec

    def delete(self, eid):
        if self.config.mode != FULLY_DYNAMIC:
            raise WrongMode("deletions need the fully-dynamic mode")
        self.op_count += 1
        rec = self.g.delete_edge(eid)
        self._cascade([ChangeEvent(DELETED, rec)])
        return rec

    def add_terminal(self, u):
        return self._cascade([], u=u)

    def query(self, s, t):
        self.op_count += 1
        if s == t:
            return 0.0
        self.pinned = {s, t}
        try:
            self.add_terminal(s)
            self.add_terminal(t)
        finally:
            self.pinned = set()
        return self.plugin.static_solver(self.top(), s, t)

    def stats(self) -> dict:
        return {
            "rebuilds": [l.rebuilds for l in self.levels],
            "counters": [l.counter for l in self.levels],
            "changes_in": [l.changes_in for l in self.levels],
            "changes_out": [l.changes_out for l in self.levels],
            # empirical branching factor per level (changes out per change in)
            "branching": [l.changes_out / l.changes_in if l.changes_in else 0.0 for l in self.levels],
            "sizes": [l.d.graph.m for l in self.levels],
        }


def hierarchy_build(g, config, factory, plugin=DISTANCE) -> Hierarchy:
    return Hierarchy(g, config, factory, plugin)


def hierarchy_insert(h: Hierarchy, u, v, w):
    return h.insert(u, v, w)


def hierarchy_delete(h: Hierarchy, eid):
    if eid not in h.g.edges:
        raise UnknownEdge(eid)
    return h.delete(eid)


def hierarchy_query(h: Hierarchy, s, t):
    return h.query(s, t)
