"""Deterministic Thorup-Zwick bunches as an incremental distance sparsifier.

The center hierarchy A_0 = V > A_1 > ... > A_r = {} is built by source
detection plus greedy hitting sets.  Bunches are frozen at preprocessing
time; a terminal u contributes the star {(u, w, d(u, w)) : w in B(u)}.
For terminals u, v the resulting graph has
    d_G(u, v) <= d_H(u, v) <= (2r - 1) d_G(u, v).
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .framework import VertexSparsifier
from .graph import DynamicGraph, as_view


class QTooLarge(ValueError):
    pass


class EmptySetInCollection(ValueError):
    pass


def source_detection(view, sources, q):
    """For every vertex, the q nearest sources ordered by (distance, id).

    Sources a vertex cannot reach come last (ordered by id) so every list
    has exactly q entries.  Returns (lists, dists) with dists[v][k] the
    distance to lists[v][k].
    """
    view = as_view(view)
    sources = sorted(set(sources))
    if not (1 <= q <= len(sources)):
        raise QTooLarge(f"q={q} with {len(sources)} sources")
    adj = view.adjacency()
    n = view.n
    lists = [[] for _ in range(n)]
    dists = [[] for _ in range(n)]
    have = [set() for _ in range(n)]
    pq = [(0.0, s, s) for s in sources]
    heapq.heapify(pq)
    while pq:
        d, s, v = heapq.heappop(pq)
        if len(lists[v]) >= q or s in have[v]:
            continue
        lists[v].append(s)
        dists[v].append(d)
        have[v].add(s)
        for y, w, _ in adj[v]:
            if len(lists[y]) < q and s not in have[y]:
                heapq.heappush(pq, (d + w, s, y))
    for v in range(n):
        if len(lists[v]) < q:
            for s in sources:
                if s not in have[v]:
                    lists[v].append(s)
                    dists[v].append(math.inf)
                    if len(lists[v]) == q:
                        break
    return lists, dists


def greedy_hitting_set(universe, sets, s=None):
    """Two-phase greedy hitting set.

    Phase 1 repeatedly takes the element hitting the most unhit sets
    (smaller id on ties) until at most |U|/s sets are unhit; phase 2 adds
    the smallest element of every remaining unhit set.
    """
    universe = sorted(set(universe))
    sets = [frozenset(x) for x in sets]
    if any(len(x) == 0 for x in sets):
        raise EmptySetInCollection()
    if not sets:
        return set()
    if s is None:
        s = min(len(x) for x in sets)
    stop = len(universe) / s
    members: dict = {}
    for i, x in enumerate(sets):
        for e in x:
            members.setdefault(e, []).append(i)
    count = {e: len(members.get(e, ())) for e in universe}
    unhit = set(range(len(sets)))
    # bucket queue would be linear; a lazy heap is plenty at our sizes
    heap = [(-c, e) for e, c in count.items() if c > 0]
    heapq.heapify(heap)
    chosen = set()
    while len(unhit) > stop and heap:
        negc, e = heapq.heappop(heap)
        if e in chosen:
            continue
        if -negc != count[e]:
            if count[e] > 0:
                heapq.heappush(heap, (-count[e], e))
            continue
        chosen.add(e)
        for i in members.get(e, ()):
            if i in unhit:
                unhit.discard(i)
                for f in sets[i]:
                    count[f] -= 1
    for i in sorted(unhit):
        if not (sets[i] & chosen):
            chosen.add(min(sets[i]))
    return chosen


def _multi_source(adj, n, sources):
    """Distance to the set and the nearest source (smallest id on ties)."""
    dist = [math.inf] * n
    piv = [-1] * n
    pq = [(0.0, s, s) for s in sorted(sources)]
    heapq.heapify(pq)
    while pq:
        d, s, v = heapq.heappop(pq)
        if piv[v] >= 0:
            continue
        dist[v], piv[v] = d, s
        for y, w, _ in adj[v]:
            if piv[y] < 0:
                heapq.heappush(pq, (d + w, s, y))
    return dist, piv


@dataclass
class CenterHierarchy:
    r: int
    q: int
    A: list  # A[0..r], A[r] empty
    dist: list  # dist[i][v] = d(A_i, v), i in 0..r
    pivot: list  # pivot[i][v]
    near: list  # near[i][v] = q nearest of A_i (source detection), i < r-1


def det_hierarchy(view, r) -> CenterHierarchy:
    if r < 1:
        raise ValueError("r must be >= 1")
    view = as_view(view)
    n = view.n
    q = int(math.ceil(n ** (1.0 / r) * (1 + math.log(max(n, 1)))))
    A = [set(range(n))]
    near = []
    for i in range(r - 1):
        qi = min(q, len(A[i]))
        if qi == 0:
            A.append(set())
            near.append([[] for _ in range(n)])
            continue
        lists, _ = source_detection(view, A[i], qi)
        near.append(lists)
        A.append(greedy_hitting_set(A[i], lists, qi))
    A.append(set())
    adj = view.adjacency()
    dist = [None] * (r + 1)
    pivot = [None] * (r + 1)
    dist[r] = [math.inf] * n
    pivot[r] = [-1] * n
    for i in range(r - 1, -1, -1):
        d, p = _multi_source(adj, n, A[i])
        for v in range(n):
            # pivot tie rule: keep the higher-level pivot on equal distance,
            # which keeps p_i(v) inside B(v)
            if d[v] == dist[i + 1][v] and pivot[i + 1][v] >= 0:
                p[v] = pivot[i + 1][v]
        dist[i], pivot[i] = d, p
    return CenterHierarchy(r, q, A, dist, pivot, near)


def compute_bunches(view, h: CenterHierarchy) -> list:
    """B(v) as dict {w: d(w, v)} via pruned Dijkstra from every center.

    w in A_i \\ A_{i+1} reaches v iff d(w, v) < d(A_{i+1}, v); the set of
    such v is closed under shortest-path prefixes, so pruning is exact.
    """
    view = as_view(view)
    adj = view.adjacency()
    n = view.n
    bunches = [dict() for _ in range(n)]
    for i in range(h.r):
        bound = h.dist[i + 1]
        for w in sorted(h.A[i] - h.A[i + 1]):
            if not (0.0 < bound[w]):
                continue
            dist = {w: 0.0}
            pq = [(0.0, w)]
            while pq:
                d, x = heapq.heappop(pq)
                if d > dist[x]:
                    continue
                bunches[x][w] = d
                for y, lw, _ in adj[x]:
                    nd = d + lw
                    if nd < bound[y] and nd < dist.get(y, math.inf):
                        dist[y] = nd
                        heapq.heappush(pq, (nd, y))
    return bunches


class TzIvs(VertexSparsifier):
    """Incremental distance sparsifier with stretch 2r - 1."""

    def __init__(self, r=2):
        super().__init__()
        self.r = r
        self.hierarchy = None
        self.bunches = None
        self._pairs: dict = {}

    @property
    def alpha(self):
        return 2 * self.r - 1

    def preprocess(self, base, terminals=()):
        self.base = base
        view = as_view(base)
        self.g0 = view
        self.hierarchy = det_hierarchy(view, self.r)
        self.bunches = compute_bunches(view, self.hierarchy)
        self.graph = DynamicGraph(view.n, max_ratio=None)
        self.terminals = set()
        self._pairs = {}
        self._direct = {}
        for u in terminals:
            self.add_terminal(u)
        return self

    def _add_terminal(self, u):
        self.terminals.add(u)
        for w, d in sorted(self.bunches[u].items()):
            if w == u:
                continue
            key = (u, w) if u < w else (w, u)
            if key in self._pairs:
                continue
            self._pairs[key] = self.graph.insert_edge(u, w, d).id

    def bunch_size(self, u) -> int:
        return len(self.bunches[u])


def tz_preprocess(view, r) -> TzIvs:
    g = view
    if not isinstance(g, DynamicGraph):
        v = as_view(view)
        g = DynamicGraph(v.n, max_ratio=None)
        for e in v.edges:
            g.insert_edge(e.u, e.v, e.w)
    return TzIvs(r).preprocess(g)


def tz_add_terminal(ivs: TzIvs, u) -> list:
    return [ev.edge for ev in ivs.add_terminal(u)]
