"""Dynamic weighted multigraph with stable edge ids.

Every sparsifier in the package observes one of these.  Mutations emit
ChangeEvent objects to subscribers, and replaying the event log over an
empty graph reproduces the edge multiset exactly.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator


class GraphError(Exception):
    pass


class NonPositiveWeight(GraphError, ValueError):
    pass


class SelfLoop(GraphError, ValueError):
    pass


class UnknownEdge(GraphError, KeyError):
    pass


class WeightRatioExceeded(GraphError, ValueError):
    pass


class VertexOutOfRange(GraphError, IndexError):
    pass


INSERTED = "inserted"
DELETED = "deleted"


@dataclass(frozen=True)
class EdgeRecord:
    id: int
    u: int
    v: int
    w: float

    def other(self, x: int) -> int:
        return self.v if x == self.u else self.u

    def key(self) -> tuple:
        return (self.u, self.v) if self.u <= self.v else (self.v, self.u)


@dataclass(frozen=True)
class ChangeEvent:
    kind: str
    edge: EdgeRecord


class GraphView:
    """Immutable edge list over vertices 0..n-1."""

    def __init__(self, n: int, edges: Iterable[EdgeRecord]):
        self.n = n
        self.edges = tuple(edges)
        self._adj = None

    @classmethod
    def from_triples(cls, n, triples):
        return cls(n, [EdgeRecord(i, int(u), int(v), float(w)) for i, (u, v, w) in enumerate(triples)])

    @property
    def m(self) -> int:
        return len(self.edges)

    def adjacency(self) -> list:
        # list of (neighbor, weight, edge id) per vertex
        if self._adj is None:
            adj = [[] for _ in range(self.n)]
            for e in self.edges:
                adj[e.u].append((e.v, e.w, e.id))
                if e.v != e.u:
                    adj[e.v].append((e.u, e.w, e.id))
            self._adj = adj
        return self._adj

    def vertices_with_edges(self) -> set:
        out = set()
        for e in self.edges:
            out.add(e.u)
            out.add(e.v)
        return out

    def edge(self, eid):
        for e in self.edges:
            if e.id == eid:
                return e
        raise UnknownEdge(eid)

    def total_weight(self) -> float:
        return float(sum(e.w for e in self.edges))

    def components(self) -> list:
        """Connected components as a label array."""
        label = [-1] * self.n
        adj = self.adjacency()
        c = 0
        for s in range(self.n):
            if label[s] >= 0:
                continue
            label[s] = c
            stack = [s]
            while stack:
                x = stack.pop()
                for y, _, _ in adj[x]:
                    if label[y] < 0:
                        label[y] = c
                        stack.append(y)
            c += 1
        return label

    def to_networkx(self):
        import networkx as nx

        g = nx.MultiGraph()
        g.add_nodes_from(range(self.n))
        for e in self.edges:
            g.add_edge(e.u, e.v, key=e.id, weight=e.w)
        return g

    def aggregated(self) -> dict:
        """Parallel edges merged: {(a, b): total weight} with a < b."""
        out: dict = {}
        for e in self.edges:
            if e.u == e.v:
                continue
            k = e.key()
            out[k] = out.get(k, 0.0) + e.w
        return out

    def __repr__(self):
        return f"GraphView(n={self.n}, m={self.m})"


class DynamicGraph:
    """Undirected weighted multigraph on a fixed vertex set 0..n-1.

    Edge ids are handed out in increasing order and never reused.  The
    weight ratio max/min is capped at n**10 unless ``max_ratio`` is given
    explicitly (internal sparsifier graphs pass ``None`` to disable it).
    """

    def __init__(self, n: int, allow_self_loops: bool = False, max_ratio="default"):
        if n < 0:
            raise ValueError("n must be non-negative")
        self.n = n
        self.allow_self_loops = allow_self_loops
        if max_ratio == "default":
            max_ratio = float(max(n, 2)) ** 10
        self.max_ratio = max_ratio
        self.edges: dict = {}
        self.adj: list = [dict() for _ in range(n)]
        self.version = 0
        self._next_id = 0
        self._listeners: list = []
        self._maxheap: list = []
        self._minheap: list = []

    # -- observers -------------------------------------------------------
    def subscribe(self, fn: Callable[[ChangeEvent], None]):
        self._listeners.append(fn)

    def unsubscribe(self, fn):
        self._listeners.remove(fn)

    def _emit(self, ev):
        for fn in list(self._listeners):
            fn(ev)

    # -- weight bounds ---------------------------------------------------
    def _prune(self):
        while self._maxheap and self._maxheap[0][1] not in self.edges:
            heapq.heappop(self._maxheap)
        while self._minheap and self._minheap[0][1] not in self.edges:
            heapq.heappop(self._minheap)

    @property
    def max_weight(self):
        self._prune()
        return -self._maxheap[0][0] if self._maxheap else None

    @property
    def min_weight(self):
        self._prune()
        return self._minheap[0][0] if self._minheap else None

    @property
    def weight_ratio(self) -> float:
        if not self.edges:
            return 1.0
        return self.max_weight / self.min_weight

    # -- mutation --------------------------------------------------------
    def _check_vertex(self, x):
        if not (0 <= x < self.n):
            raise VertexOutOfRange(x)

    def insert_edge(self, u: int, v: int, w: float) -> EdgeRecord:
        u, v = int(u), int(v)
        self._check_vertex(u)
        self._check_vertex(v)
        w = float(w)
        if not (w > 0):
            raise NonPositiveWeight(w)
        if u == v and not self.allow_self_loops:
            raise SelfLoop(u)
        if self.max_ratio is not None and self.edges:
            hi = max(self.max_weight, w)
            lo = min(self.min_weight, w)
            if hi / lo > self.max_ratio:
                raise WeightRatioExceeded(f"ratio {hi / lo:g} exceeds {self.max_ratio:g}")
        rec = EdgeRecord(self._next_id, u, v, w)
        self._next_id += 1
        self.edges[rec.id] = rec
        self.adj[u][rec.id] = v
        self.adj[v][rec.id] = u
        heapq.heappush(self._maxheap, (-w, rec.id))
        heapq.heappush(self._minheap, (w, rec.id))
        self.version += 1
        self._emit(ChangeEvent(INSERTED, rec))
        return rec

    def delete_edge(self, eid: int) -> EdgeRecord:
        rec = self.edges.pop(eid, None)
        if rec is None:
            raise UnknownEdge(eid)
        del self.adj[rec.u][eid]
        if rec.v != rec.u:
            del self.adj[rec.v][eid]
        self.version += 1
        self._emit(ChangeEvent(DELETED, rec))
        return rec

    def find_edge(self, u: int, v: int):
        """Live (u, v) edge with the smallest id, or None."""
        best = None
        for eid, y in self.adj[u].items():
            if y == v and (best is None or eid < best):
                best = eid
        return None if best is None else self.edges[best]

    def delete_uv(self, u: int, v: int) -> EdgeRecord:
        rec = self.find_edge(u, v)
        if rec is None:
            raise UnknownEdge((u, v))
        return self.delete_edge(rec.id)

    def apply(self, ev: ChangeEvent):
        """Replay an event keeping its edge id (used for log replay)."""
        rec = ev.edge
        if ev.kind == INSERTED:
            if rec.id in self.edges:
                raise GraphError(f"edge id {rec.id} already live")
            self.edges[rec.id] = rec
            self.adj[rec.u][rec.id] = rec.v
            self.adj[rec.v][rec.id] = rec.u
            heapq.heappush(self._maxheap, (-rec.w, rec.id))
            heapq.heappush(self._minheap, (rec.w, rec.id))
            self._next_id = max(self._next_id, rec.id + 1)
            self.version += 1
            self._emit(ev)
        else:
            self.delete_edge(rec.id)

    # -- queries ---------------------------------------------------------
    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    def incident(self, u: int) -> Iterator[EdgeRecord]:
        for eid in self.adj[u]:
            yield self.edges[eid]

    def neighbors(self, u: int):
        return set(self.adj[u].values())

    def has_edge_id(self, eid) -> bool:
        return eid in self.edges

    def snapshot(self) -> GraphView:
        return GraphView(self.n, sorted(self.edges.values(), key=lambda e: e.id))

    def copy(self) -> "DynamicGraph":
        g = DynamicGraph(self.n, self.allow_self_loops, self.max_ratio)
        for rec in sorted(self.edges.values(), key=lambda e: e.id):
            g.apply(ChangeEvent(INSERTED, rec))
        g._next_id = self._next_id
        return g

    def __repr__(self):
        return f"DynamicGraph(n={self.n}, m={self.m}, version={self.version})"


def replay(n: int, events: Iterable[ChangeEvent], **kw) -> DynamicGraph:
    g = DynamicGraph(n, **kw)
    for ev in events:
        g.apply(ev)
    return g


def as_view(g) -> GraphView:
    if isinstance(g, GraphView):
        return g
    if isinstance(g, DynamicGraph):
        return g.snapshot()
    raise TypeError(f"cannot view {type(g).__name__}")
