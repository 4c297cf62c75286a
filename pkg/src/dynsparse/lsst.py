"""Spanning trees with low (importance-weighted) stretch, plus rooted-forest
helpers shared by the j-tree modules.

The tree builder is AKPW-flavoured: edges are grouped into length classes
(powers of two); in phase j the clusters formed so far are merged by
growing balls over edges of class <= j, stopping a ball once the
multiplicity of the edges leaving it is small against the multiplicity
inside.  Inside each ball the clusters are joined by a shortest-path tree
under the effective length l(e) / r(e), so heavily replicated edges are
preferred.  The average stretch is measured, not guaranteed.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .graph import as_view


class DisconnectedInput(ValueError):
    pass


class _DSU:
    def __init__(self, n):
        self.p = list(range(n))

    def find(self, x):
        p = self.p
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a == b:
            return False
        if b < a:
            a, b = b, a
        self.p[b] = a
        return True


def akpw_tree(n, edges, mult=None, expand=0.5):
    """Spanning forest of a multigraph.

    edges: list of EdgeRecord-like objects (id, u, v, w) where w is the
    length; mult[i] is the multiplicity of edges[i] (default 1).
    Returns the list of indices into ``edges`` forming the forest.
    """
    if mult is None:
        mult = [1] * len(edges)
    live = [i for i, e in enumerate(edges) if e.u != e.v]
    if not live:
        return []
    lmin = min(edges[i].w for i in live)
    cls = {i: int(math.floor(math.log2(edges[i].w / lmin) + 1e-12)) for i in live}
    top = max(cls.values())
    dsu = _DSU(n)
    chosen = []
    phase = 0
    while True:
        # contracted multigraph over clusters using edges of class <= phase
        adj: dict = {}
        for i in live:
            if cls[i] > phase:
                continue
            a, b = dsu.find(edges[i].u), dsu.find(edges[i].v)
            if a == b:
                continue
            adj.setdefault(a, []).append((b, i))
            adj.setdefault(b, []).append((a, i))
        if not adj:
            if phase >= top:
                break
            phase += 1
            continue
        done = set()
        for c in sorted(adj):
            if c in done:
                continue
            ball = {c}
            inside = 0.0
            frontier = [c]
            while True:
                out_w = 0.0
                nxt = set()
                for x in frontier:
                    for y, i in adj[x]:
                        if y in ball or y in done:
                            continue
                        out_w += mult[i]
                        nxt.add(y)
                if not nxt or out_w <= expand * (inside + 1.0):
                    break
                for y in nxt:
                    ball.add(y)
                inside = 0.0
                for x in ball:
                    for y, i in adj[x]:
                        if y in ball and x < y:
                            inside += mult[i]
                frontier = sorted(nxt)
            done |= ball
            # shortest-path tree inside the ball, effective length l / r
            dist = {c: 0.0}
            pq = [(0.0, c)]
            via = {}
            while pq:
                d, x = heapq.heappop(pq)
                if d > dist[x]:
                    continue
                for y, i in adj[x]:
                    if y not in ball:
                        continue
                    nd = d + edges[i].w / mult[i]
                    if nd < dist.get(y, math.inf):
                        dist[y] = nd
                        via[y] = i
                        heapq.heappush(pq, (nd, y))
            for y in sorted(via):
                i = via[y]
                if dsu.union(edges[i].u, edges[i].v):
                    chosen.append(i)
        phase += 1
        if phase > top + 64:
            break
    return chosen


# -- rooted forests ------------------------------------------------------------

@dataclass
class RootedForest:
    n: int
    parent: list  # -1 for roots
    pedge: list  # edge id to parent, -1 for roots
    plen: list  # length of the parent edge
    depth: list  # hops from the root
    dist: list  # weighted distance from the root
    root: list  # root of each vertex
    order: list  # BFS order (parents before children)
    children: list

    @classmethod
    def build(cls, n, tree_edges, roots=None):
        """tree_edges: iterable of (u, v, eid, length)."""
        adj = [[] for _ in range(n)]
        for u, v, eid, ln in tree_edges:
            adj[u].append((v, eid, ln))
            adj[v].append((u, eid, ln))
        parent = [-1] * n
        pedge = [-1] * n
        plen = [0.0] * n
        depth = [0] * n
        dist = [0.0] * n
        root = [-1] * n
        order = []
        children = [[] for _ in range(n)]
        starts = list(roots or []) + list(range(n))
        for s in starts:
            if root[s] >= 0:
                continue
            root[s] = s
            q = [s]
            order.append(s)
            for x in q:
                for y, eid, ln in sorted(adj[x], key=lambda t: (t[1], t[0])):
                    if root[y] >= 0:
                        continue
                    root[y] = s
                    parent[y] = x
                    pedge[y] = eid
                    plen[y] = ln
                    depth[y] = depth[x] + 1
                    dist[y] = dist[x] + ln
                    children[x].append(y)
                    q.append(y)
                    order.append(y)
        return cls(n, parent, pedge, plen, depth, dist, root, order, children)

    def lca(self, a, b):
        if self.root[a] != self.root[b]:
            return -1
        while self.depth[a] > self.depth[b]:
            a = self.parent[a]
        while self.depth[b] > self.depth[a]:
            b = self.parent[b]
        while a != b:
            a, b = self.parent[a], self.parent[b]
        return a

    def distance(self, a, b):
        c = self.lca(a, b)
        if c < 0:
            return math.inf
        return self.dist[a] + self.dist[b] - 2 * self.dist[c]

    def path_vertices(self, a, b):
        """Vertices of T[a, b] in order from a to b."""
        c = self.lca(a, b)
        if c < 0:
            raise DisconnectedInput((a, b))
        left, right = [], []
        while a != c:
            left.append(a)
            a = self.parent[a]
        while b != c:
            right.append(b)
            b = self.parent[b]
        return left + [c] + right[::-1]

    def path_edges(self, a, b):
        """Tree edge ids on T[a, b] (as child vertices, from a to b)."""
        c = self.lca(a, b)
        if c < 0:
            raise DisconnectedInput((a, b))
        left, right = [], []
        while a != c:
            left.append(a)
            a = self.parent[a]
        while b != c:
            right.append(b)
            b = self.parent[b]
        return left + right[::-1]


def tree_of(view, tree_ids):
    view = as_view(view)
    by_id = {e.id: e for e in view.edges}
    return RootedForest.build(view.n, [(by_id[i].u, by_id[i].v, i, by_id[i].w) for i in sorted(tree_ids)])


def replication(view, lengths, weights):
    """r(e) = 1 + floor(l(e) w(e) |E| / w(G)) with w(G) = sum_e l(e) w(e)."""
    m = len(view.edges)
    tot = math.fsum(lengths[e.id] * weights[e.id] for e in view.edges)
    if not tot > 0:
        return {e.id: 1 for e in view.edges}
    return {e.id: 1 + int(math.floor(lengths[e.id] * weights[e.id] * m / tot)) for e in view.edges}


@dataclass
class LsstResult:
    tree: list  # edge ids
    forest: RootedForest
    alpha_emp: float  # average stretch over the replicated multigraph
    weighted_ratio: float  # sum d_T w / sum l w


def generalized_lsst(view, lengths=None, weights=None) -> LsstResult:
    """Spanning forest T with sum_e d_T(e) w(e) <= 2 alpha_emp sum_e l(e) w(e).

    lengths / weights: dicts keyed by edge id (default: the edge weight as
    length and unit importance).
    """
    view = as_view(view)
    edges = [e for e in view.edges if e.u != e.v]
    if lengths is None:
        lengths = {e.id: e.w for e in edges}
    if weights is None:
        weights = {e.id: 1.0 for e in edges}
    if any(weights[e.id] < 0 for e in edges):
        raise ValueError("importance weights must be non-negative")
    rep = replication(view, lengths, weights)

    class _E:
        __slots__ = ("id", "u", "v", "w")

        def __init__(self, e):
            self.id, self.u, self.v, self.w = e.id, e.u, e.v, lengths[e.id]

    work = [_E(e) for e in edges]
    idx = akpw_tree(view.n, work, [rep[e.id] for e in edges])
    tree = sorted(edges[i].id for i in idx)
    forest = RootedForest.build(view.n, [(edges[i].u, edges[i].v, edges[i].id, lengths[edges[i].id]) for i in idx])
    num = den = 0.0
    wnum = wden = 0.0
    for e in edges:
        d = forest.distance(e.u, e.v)
        num += rep[e.id] * d / lengths[e.id]
        den += rep[e.id]
        wnum += d * weights[e.id]
        wden += lengths[e.id] * weights[e.id]
    return LsstResult(tree, forest, num / den if den else 1.0, wnum / wden if wden > 0 else 1.0)
