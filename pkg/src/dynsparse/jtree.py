"""j-trees for dynamic min s-t cuts.

A j-tree H of G is an envelope forest T \\ F hanging off a core C where
every envelope component holds exactly one core vertex (its
representative).  Edges of G leaving a component are routed through the
representative, so

* the core is G contracted along the envelope components, and
* an envelope edge above subtree X carries c_G(boundary of X).

That is the canonical embedding of G into H, hence c_G(S) <= c_H(S) for
every cut S.  Min s-t cuts with s, t in C can be read off the core alone.
"""
from __future__ import annotations

import bisect
import math
import random
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import oracles
from .graph import DynamicGraph, GraphView, UnknownEdge, as_view
from .linkcut import LinkCutForest
from .lsst import DisconnectedInput, RootedForest, generalized_lsst


# -- skeleton trees -----------------------------------------------------------------

def steiner_counts(forest: RootedForest, C):
    cnt = [0] * forest.n
    for v in C:
        cnt[v] += 1
    for v in reversed(forest.order):
        p = forest.parent[v]
        if p >= 0:
            cnt[p] += cnt[v]
    return cnt


def skeleton_vertices(forest: RootedForest, C) -> set:
    """C plus every vertex of Steiner degree >= 3 (pairwise LCAs)."""
    C = set(C)
    cnt = steiner_counts(forest, C)
    out = set(C)
    for v in range(forest.n):
        tot = cnt[forest.root[v]]
        if tot == 0:
            continue
        deg = sum(1 for c in forest.children[v] if cnt[c] > 0)
        if tot - cnt[v] > 0:
            deg += 1
        if deg >= 3:
            out.add(v)
    return out


def skeleton_edges(forest: RootedForest, S) -> list:
    """Edges (a, b, tree-path vertices) of S(T, S) for a skeleton set S."""
    S = set(S)
    cnt = steiner_counts(forest, S)
    sadj = [[] for _ in range(forest.n)]
    for v in range(forest.n):
        p = forest.parent[v]
        if p >= 0 and cnt[v] > 0 and cnt[forest.root[v]] - cnt[v] > 0:
            sadj[v].append(p)
            sadj[p].append(v)
    out = []
    for a in sorted(S):
        for first in sorted(sadj[a]):
            path = [a]
            prev, x = a, first
            while x not in S:
                path.append(x)
                nxt = [y for y in sadj[x] if y != prev]
                prev, x = x, nxt[0]
            path.append(x)
            if a < x:
                out.append((a, x, path))
    return out


class SkeletonTreeIndex:
    """Dynamic skeleton S(T, C) of a forest under vertex additions and the
    removal of tree edges between skeleton vertices.

    ``add(u)`` returns the list of new skeleton vertices (u and at most one
    branch vertex) together with the skeleton-edge changes.
    """

    def __init__(self, n, tree_edges, C=()):
        # tree_edges: iterable of (u, v, eid, length)
        self.n = n
        self.adj = [dict() for _ in range(n)]  # v -> {nbr: (eid, length)}
        for u, v, eid, ln in tree_edges:
            self.adj[u][v] = (eid, ln)
            self.adj[v][u] = (eid, ln)
        self.steiner: set = set()
        self.skel: set = set()
        self.sadj: dict = {}  # skeleton vertex -> {skeleton nbr: length}
        for u in sorted(C):
            self.add(u)

    def _sdeg(self, v):
        return sum(1 for y in self.adj[v] if y in self.steiner)

    def _walk(self, a, first):
        """Follow Steiner vertices from a through ``first`` to the next
        skeleton vertex; returns (end, length, interior vertices)."""
        prev, x = a, first
        length = self.adj[a][first][1]
        inner = []
        while x not in self.skel:
            inner.append(x)
            nxt = [y for y in self.adj[x] if y in self.steiner and y != prev]
            prev, x = x, nxt[0]
            length += self.adj[prev][x][1]
        return x, length, inner

    def _link(self, a, b, length, changes):
        self.sadj.setdefault(a, {})[b] = length
        self.sadj.setdefault(b, {})[a] = length
        changes.append(("+", min(a, b), max(a, b), length))

    def _unlink(self, a, b, changes):
        length = self.sadj[a].pop(b)
        self.sadj[b].pop(a)
        changes.append(("-", min(a, b), max(a, b), length))

    def _make_skeleton(self, x, changes):
        """Turn a Steiner path vertex into a skeleton vertex, splitting the
        skeleton edge through it."""
        if x in self.skel:
            return False
        ends = []
        for y in sorted(self.adj[x]):
            if y in self.steiner:
                prev, z = x, y
                length = self.adj[x][y][1]
                while z not in self.skel:
                    nxt = [w for w in self.adj[z] if w in self.steiner and w != prev]
                    prev, z = z, nxt[0]
                    length += self.adj[prev][z][1]
                ends.append((z, length))
        self.skel.add(x)
        self.sadj.setdefault(x, {})
        if len(ends) == 2:
            (a, la), (b, lb) = ends
            if a in self.sadj and b in self.sadj[a]:
                self._unlink(a, b, changes)
            self._link(a, x, la, changes)
            self._link(x, b, lb, changes)
        else:
            for a, la in ends:
                self._link(a, x, la, changes)
        return True

    def add(self, u):
        """Returns (new skeleton vertices, skeleton edge changes)."""
        changes = []
        if u in self.skel:
            return [], changes
        if u in self.steiner:
            self._make_skeleton(u, changes)
            return [u], changes
        # BFS in u's tree for the nearest Steiner vertex
        prev = {u: None}
        q = deque([u])
        hit = None
        while q:
            x = q.popleft()
            if x in self.steiner:
                hit = x
                break
            for y in sorted(self.adj[x]):
                if y not in prev:
                    prev[y] = x
                    q.append(y)
        new = [u]
        if hit is None:
            self.steiner.add(u)
            self.skel.add(u)
            self.sadj.setdefault(u, {})
            return new, changes
        if self._make_skeleton(hit, changes):
            new.append(hit)
        path = []
        x = prev[hit]
        length = self.adj[hit][x][1]
        while x is not None:
            path.append(x)
            y = prev[x]
            if y is not None:
                length += self.adj[x][y][1]
            x = y
        for x in path:
            self.steiner.add(x)
        self.skel.add(u)
        self.sadj.setdefault(u, {})
        self._link(hit, u, length, changes)
        return new, changes

    def remove_tree_edge(self, a, b):
        """Drop the tree edge ab (both endpoints must be skeleton vertices)."""
        if a not in self.skel or b not in self.skel:
            raise ValueError("only edges between skeleton vertices can be removed")
        changes = []
        del self.adj[a][b]
        del self.adj[b][a]
        if b in self.sadj.get(a, {}):
            self._unlink(a, b, changes)
        return changes

    def neighbors(self, u):
        return dict(self.sadj.get(u, {}))

    def edges(self):
        return sorted((a, b, l) for a, d in self.sadj.items() for b, l in d.items() if a < b)


# -- ComputeTCF -----------------------------------------------------------------------

@dataclass
class TCF:
    tree: list  # tree edge ids
    forest: RootedForest
    C: set
    F: set
    rload: dict  # tree edge id -> relative load of G routed on T
    alpha_emp: float = 1.0


def tree_flow(view, forest: RootedForest):
    """Flow on every tree edge when each G edge is routed along its tree path."""
    acc = [0.0] * forest.n
    for e in view.edges:
        if e.u == e.v:
            continue
        c = forest.lca(e.u, e.v)
        if c < 0:
            raise DisconnectedInput((e.u, e.v))
        acc[e.u] += e.w
        acc[e.v] += e.w
        acc[c] -= 2 * e.w
    flow = {}
    for v in reversed(forest.order):
        p = forest.parent[v]
        if p >= 0:
            acc[p] += acc[v]
            flow[forest.pedge[v]] = acc[v]
    return flow


def spacing_vertices(forest: RootedForest, C, L) -> set:
    """Greedy bottom-up set so that every tree path on L vertices hits C."""
    C = set(C)
    add = set()
    h = [0] * forest.n  # longest C-free downward chain starting at v (vertices)
    for v in reversed(forest.order):
        if v in C:
            h[v] = 0
            continue
        kids = sorted((h[c] for c in forest.children[v]), reverse=True)
        a = kids[0] if kids else 0
        b = kids[1] if len(kids) > 1 else 0
        if a + 1 >= L or a + b + 1 >= L:
            add.add(v)
            h[v] = 0
        else:
            h[v] = a + 1
    return add


def compute_tcf(view, j, loads=None, terminals=(), allow_forest=False) -> TCF:
    """Spanning tree T, core C and tree partition F.

    loads: per-edge lengths for the low-stretch tree (default 1/c).
    """
    view = as_view(view)
    if j < 1:
        raise ValueError("j must be >= 1")
    n = view.n
    edges = [e for e in view.edges if e.u != e.v]
    if not allow_forest and n > 1 and len(set(view.components())) > 1:
        raise DisconnectedInput("graph is not connected")
    if loads is None:
        loads = {e.id: 1.0 / e.w for e in edges}
    lsst = generalized_lsst(GraphView(n, edges), loads, {e.id: e.w for e in edges})
    by_id = {e.id: e for e in edges}
    forest = RootedForest.build(n, [(by_id[i].u, by_id[i].v, i, by_id[i].w) for i in lsst.tree])
    flow = tree_flow(GraphView(n, edges), forest)
    rload = {i: flow[i] / by_id[i].w for i in lsst.tree}
    F = set()
    if rload:
        R = max(rload.values())
        nb = int(math.ceil(math.log2(max(max(flow.values()), 1.0)) + 1))
        thresh = j / (2.0 * max(1, math.ceil(math.log2(max(n, 2)))))
        buckets = {}
        for i, rl in rload.items():
            if rl <= 0:
                continue
            b = int(math.floor(math.log2(R / rl))) + 1
            if b <= nb:
                buckets.setdefault(b, []).append(i)
        i0 = None
        for b in range(1, nb + 1):
            if len(buckets.get(b, ())) >= thresh:
                i0 = b
                break
        if i0 is None:
            i0 = nb
        for b in range(1, i0 + 1):
            F.update(buckets.get(b, ()))
    C = set(terminals)
    for i in F:
        C.update((by_id[i].u, by_id[i].v))
    L = int(math.ceil(4.0 * n / j))
    C |= spacing_vertices(forest, C, L)
    # every tree of the forest needs a core vertex
    have = {forest.root[v] for v in C}
    for v in range(n):
        r = forest.root[v]
        if r == v and r not in have:
            C.add(r)
    C = skeleton_vertices(forest, C)
    for a, b, path in skeleton_edges(forest, C):
        ids = []
        for x, y in zip(path, path[1:]):
            ids.append(forest.pedge[x] if forest.parent[x] == y else forest.pedge[y])
        best = max(ids, key=lambda i: (rload[i], -i))
        F.add(best)
    return TCF(sorted(lsst.tree), forest, C, F, rload, lsst.alpha_emp)


# -- the j-tree -------------------------------------------------------------------------

class WalkStore:
    """Where every G edge's walks end: the components of its endpoints.
    P[cid] holds the edges with a walk ending at cid's representative."""

    def __init__(self):
        self.ends: dict = {}
        self.P: dict = {}

    def put(self, eid, a, b):
        self.drop(eid)
        self.ends[eid] = (a, b)
        self.P.setdefault(a, set()).add(eid)
        self.P.setdefault(b, set()).add(eid)

    def drop(self, eid):
        old = self.ends.pop(eid, None)
        if old is not None:
            for c in old:
                s = self.P.get(c)
                if s is not None:
                    s.discard(eid)


@dataclass
class CoreChange:
    a: int
    b: int
    old: float
    new: float


class JTree:
    """Mutable j-tree; always equal to Route(G, T, C, F) for the current
    G, C and F."""

    def __init__(self, n, edges, tree, C, F, e_rule="min"):
        if e_rule not in ("min", "max"):
            raise ValueError(e_rule)
        self.n = n
        self.e_rule = e_rule
        self.edges = {e.id: e for e in edges}
        self.g_adj = [set() for _ in range(n)]
        for e in self.edges.values():
            self.g_adj[e.u].add(e.id)
            self.g_adj[e.v].add(e.id)
        self.tree = set(tree)
        self.F = set(F)
        self.env_adj = [dict() for _ in range(n)]
        for i in self.tree - self.F:
            e = self.edges[i]
            self.env_adj[e.u][e.v] = i
            self.env_adj[e.v][e.u] = i
        self.comp_of = [-1] * n
        self.rep: dict = {}
        self.members: dict = {}
        self._next_cid = 0
        for c in sorted(C):
            if self.comp_of[c] >= 0:
                raise ValueError("F is not a tree partition: two core vertices share a component")
            cid = self._new_cid(c)
            q = [c]
            self.comp_of[c] = cid
            for x in q:
                for y in self.env_adj[x]:
                    if self.comp_of[y] < 0:
                        self.comp_of[y] = cid
                        q.append(y)
                    elif self.comp_of[y] != cid:
                        raise ValueError("F is not a tree partition")
            self.members[cid] = set(q)
        if any(x < 0 for x in self.comp_of):
            raise ValueError("F is not a tree partition: a component has no core vertex")
        self.core: dict = {}
        self.walks = WalkStore()
        for e in self.edges.values():
            self._place(e)
        self.cH: dict = {}
        self.lcf = LinkCutForest(n)
        for cid in sorted(self.members):
            self._recompute_env(cid, link=True)
        self.recourse = 0

    # -- bookkeeping --------------------------------------------------------
    def _new_cid(self, r):
        cid = self._next_cid
        self._next_cid += 1
        self.rep[cid] = r
        return cid

    @property
    def C(self):
        return set(self.rep.values())

    def rep_of(self, v):
        return self.rep[self.comp_of[v]]

    def _pair(self, e):
        a, b = self.rep_of(e.u), self.rep_of(e.v)
        if a == b:
            return None
        return (a, b) if a < b else (b, a)

    def _place(self, e):
        self.walks.put(e.id, self.comp_of[e.u], self.comp_of[e.v])
        p = self._pair(e)
        if p is not None:
            self.core.setdefault(p, {})[e.id] = e.w
        return p

    def _unplace(self, e, p):
        self.walks.drop(e.id)
        if p is not None:
            d = self.core[p]
            d.pop(e.id)
            if not d:
                del self.core[p]

    def core_weight(self, p):
        d = self.core.get(p)
        return math.fsum(d[i] for i in sorted(d)) if d else 0.0

    def _local_tree(self, cid):
        r = self.rep[cid]
        par = {r: (None, None)}
        order = [r]
        for x in order:
            for y, i in sorted(self.env_adj[x].items()):
                if y not in par:
                    par[y] = (x, i)
                    order.append(y)
        return par, order

    def _recompute_env(self, cid, link=False):
        par, order = self._local_tree(cid)
        depth = {self.rep[cid]: 0}
        for x in order[1:]:
            depth[x] = depth[par[x][0]] + 1

        def lca(a, b):
            while depth[a] > depth[b]:
                a = par[a][0]
            while depth[b] > depth[a]:
                b = par[b][0]
            while a != b:
                a, b = par[a][0], par[b][0]
            return a

        acc = {x: 0.0 for x in order}
        for v in order:
            for i in self.g_adj[v]:
                e = self.edges[i]
                o = e.other(v)
                if o in acc:
                    if v < o:
                        c = lca(v, o)
                        acc[v] += e.w
                        acc[o] += e.w
                        acc[c] -= 2 * e.w
                else:
                    acc[v] += e.w
        for x in reversed(order[1:]):
            p, i = par[x]
            acc[p] += acc[x]
            w = acc[x]
            old = self.cH.get(i)
            self.cH[i] = w
            if link:
                e = self.edges[i]
                self.lcf.link(e.u, e.v, i, w)
            elif old != w:
                self.lcf.set_weight(i, w)

    # -- operations --------------------------------------------------------
    def add_terminal(self, u) -> list:
        cid = self.comp_of[u]
        x = self.rep[cid]
        if x == u:
            return []
        pick = self.lcf.path_min(u, x) if self.e_rule == "min" else self.lcf.path_max(u, x)
        _, eu = pick
        e = self.edges[eu]
        self.lcf.cut(eu)
        del self.env_adj[e.u][e.v]
        del self.env_adj[e.v][e.u]
        self.cH.pop(eu)
        self.F.add(eu)
        # the part of the component now hanging off u
        B = {u}
        q = [u]
        for y in q:
            for z in self.env_adj[y]:
                if z not in B:
                    B.add(z)
                    q.append(z)
        A = self.members[cid] - B
        affected = sorted({i for v in B for i in self.g_adj[v]})
        before = {i: self._pair(self.edges[i]) for i in affected}
        # relabel the smaller side
        if len(B) <= len(A):
            nid = self._new_cid(u)
            moved, self.members[cid] = B, A
        else:
            nid = self._new_cid(x)
            self.rep[cid] = u
            moved, self.members[cid] = A, B
        self.members[nid] = moved
        for v in moved:
            self.comp_of[v] = nid
        touched = set()
        olds = {}
        for i in affected:
            ed = self.edges[i]
            p0 = before[i]
            if p0 is not None and p0 not in olds:
                olds[p0] = self.core_weight(p0)
            self._unplace(ed, p0)
            p1 = self._place(ed)
            if p1 is not None and p1 not in olds:
                olds[p1] = self.core_weight(p1) - ed.w if p1 != p0 else olds.get(p1, 0.0)
            touched.update(p for p in (p0, p1) if p is not None)
        # re-place edges incident to the moved side that were not affected
        for v in moved:
            for i in self.g_adj[v]:
                if i not in before:
                    ed = self.edges[i]
                    self.walks.put(i, self.comp_of[ed.u], self.comp_of[ed.v])
        self._recompute_env(cid)
        self._recompute_env(nid)
        return self._changes(touched, olds)

    def _changes(self, touched, olds):
        out = []
        for p in sorted(touched):
            new = self.core_weight(p)
            old = olds.get(p, 0.0)
            if abs(new - old) > 1e-12 * max(1.0, abs(old)):
                out.append(CoreChange(p[0], p[1], old, new))
        self.recourse += len(out)
        return out

    def insert(self, rec) -> list:
        ch = self.add_terminal(rec.u) + self.add_terminal(rec.v)
        self.edges[rec.id] = rec
        self.g_adj[rec.u].add(rec.id)
        self.g_adj[rec.v].add(rec.id)
        p = (min(rec.u, rec.v), max(rec.u, rec.v))
        old = self.core_weight(p)
        self._place(rec)
        return ch + self._changes({p}, {p: old})

    def delete(self, rec) -> list:
        if rec.id not in self.edges:
            raise UnknownEdge(rec.id)
        ch = self.add_terminal(rec.u) + self.add_terminal(rec.v)
        p = self._pair(rec)
        old = self.core_weight(p)
        self._unplace(rec, p)
        del self.edges[rec.id]
        self.g_adj[rec.u].discard(rec.id)
        self.g_adj[rec.v].discard(rec.id)
        self.tree.discard(rec.id)
        self.F.discard(rec.id)
        return ch + self._changes({p}, {p: old})

    # -- views -------------------------------------------------------------
    def core_view(self) -> GraphView:
        trip = [(a, b, self.core_weight((a, b))) for (a, b) in sorted(self.core)]
        return GraphView.from_triples(self.n, [t for t in trip if t[2] > 0])

    def as_view(self) -> GraphView:
        """All of H: envelope edges with their loads plus the core."""
        trip = []
        for i in sorted(self.cH):
            e = self.edges[i]
            trip.append((e.u, e.v, self.cH[i]))
        trip += [(a, b, self.core_weight((a, b))) for (a, b) in sorted(self.core)]
        return GraphView.from_triples(self.n, [t for t in trip if t[2] > 0])

    def expand(self, core_side) -> set:
        """Core cut Pi(S): whole envelope components of the chosen core vertices."""
        out = set()
        for cid, r in self.rep.items():
            if r in core_side:
                out |= self.members[cid]
        return out

    def min_cut(self, s, t, core=None):
        self.add_terminal(s)
        self.add_terminal(t)
        if core is None:
            core = self.core_view()
        val, side = oracles.dinic(self.n, ((e.u, e.v, e.w) for e in core.edges), s, t)
        return float(val), frozenset(v for v in side if v in self.C)

    def check_partition(self):
        """Every envelope component has exactly one core vertex."""
        seen = [-1] * self.n
        for cid, r in self.rep.items():
            q = [r]
            seen[r] = cid
            for x in q:
                for y in self.env_adj[x]:
                    if seen[y] >= 0 and seen[y] != cid:
                        return False
                    if seen[y] < 0:
                        seen[y] = cid
                        q.append(y)
            if set(q) != self.members[cid]:
                return False
        return all(s >= 0 for s in seen)

    def rload(self) -> dict:
        """Relative load on each G edge when H is routed back into G."""
        load = {i: 0.0 for i in self.edges}
        for i, w in self.cH.items():
            load[i] += w
        for cid in self.members:
            par, order = self._local_tree(cid)
            acc = {x: 0.0 for x in order}
            for v in order:
                for i in self.g_adj[v]:
                    e = self.edges[i]
                    if self.comp_of[e.other(v)] != cid:
                        acc[v] += e.w
            for x in reversed(order[1:]):
                p, i = par[x]
                acc[p] += acc[x]
                load[i] += acc[x]
        for p, d in self.core.items():
            for i, w in d.items():
                load[i] += w
        return {i: load[i] / self.edges[i].w for i in load}


def route(view, T, C, F, e_rule="min") -> JTree:
    view = as_view(view)
    return JTree(view.n, [e for e in view.edges if e.u != e.v], T, C, F, e_rule=e_rule)


def jt_add_terminal(jt: JTree, u) -> list:
    return jt.add_terminal(u)


def jt_update_edge(jt: JTree, op, rec) -> list:
    if op == "I":
        return jt.insert(rec)
    if op == "D":
        return jt.delete(rec)
    raise ValueError(op)


def er_cut_sparsify(view, eps, rng, c=9.0):
    """Effective-resistance sampling: q = ceil(c n ln n / eps^2) draws with
    p_e proportional to w_e R_e, each kept edge reweighted by w_e / (q p_e).
    Returns the input when q is not smaller than the number of edges."""
    view = as_view(view)
    verts = sorted(view.vertices_with_edges())
    nn = len(verts)
    if nn < 2:
        return view
    q = int(math.ceil(c * nn * math.log(max(nn, 2)) / (eps * eps)))
    if q >= view.m:
        return view
    idx = {v: i for i, v in enumerate(verts)}
    L = oracles.laplacian(view, verts)
    P = np.linalg.pinv(L)
    score = []
    for e in view.edges:
        a, b = idx[e.u], idx[e.v]
        score.append(e.w * max(P[a, a] + P[b, b] - 2 * P[a, b], 0.0))
    tot = math.fsum(score)
    pref = np.cumsum(score)
    acc: dict = {}
    for _ in range(q):
        i = min(int(np.searchsorted(pref, rng.random() * tot, side="right")), view.m - 1)
        e = view.edges[i]
        acc[i] = acc.get(i, 0.0) + e.w * tot / (q * score[i])
    return GraphView.from_triples(view.n, [(view.edges[i].u, view.edges[i].v, acc[i]) for i in sorted(acc)])


# -- decompositions ---------------------------------------------------------------------

def softmax(x):
    mx = max(x) if x else 0.0
    ex = [math.exp(v - mx) for v in x]
    s = math.fsum(ex)
    return [v / s for v in ex]


def lmax(x):
    mx = max(x)
    return mx + math.log(math.fsum(math.exp(v - mx) for v in x))


@dataclass
class CutDecompResult:
    lam: list
    trees: list
    rho_emp: float
    iterations: int
    capped: bool
    core_sizes: list = field(default_factory=list)


def default_k(m, n, j):
    return max(1, int(math.ceil(m * math.ceil(math.log2(max(n, 2))) ** 2 / j)))


def mwu_cut_decomposition(view, j, k=None, e_rule="min") -> CutDecompResult:
    """Convex combination of j-trees with sum_i lam_i H_i routed in G at
    congestion rho_emp = max_e sum_i lam_i rload_i(e)."""
    view = as_view(view)
    edges = [e for e in view.edges if e.u != e.v]
    m = len(edges)
    if k is None:
        k = default_k(m, view.n, j)
    cap = int(math.ceil(1.5 * k))
    x = [0.0] * m
    lam, trees = [], []
    capped = False
    it = 0
    while math.fsum(lam) < 1.0:
        if it >= cap:
            capped = True
            break
        it += 1
        p = softmax(x) if m else []
        loads = {e.id: max(p[i], 1e-300) / e.w for i, e in enumerate(edges)}
        tcf = compute_tcf(GraphView(view.n, edges), j, loads, allow_forest=True)
        jt = route(GraphView(view.n, edges), tcf.tree, tcf.C, tcf.F, e_rule=e_rule)
        rl = jt.rload()
        vec = [rl[e.id] for e in edges]
        eta = max(vec) if vec else 1.0
        delta = min(1.0 / eta if eta > 0 else 1.0, 1.0 - math.fsum(lam))
        lam.append(delta)
        trees.append(jt)
        for i in range(m):
            x[i] += delta * vec[i]
    s = math.fsum(lam)
    if capped:
        lam = [v / s for v in lam]
        x = [v / s for v in x]
    rho = max(x) if x else 1.0
    return CutDecompResult(lam, trees, rho, it, capped, [len(t.C) for t in trees])


def sample_indices(lam, t, rng) -> list:
    """t draws proportional to lam by inverse CDF; returns sorted distinct indices."""
    pref = []
    acc = 0.0
    for v in lam:
        acc += v
        pref.append(acc)
    out = set()
    for _ in range(t):
        r = rng.random() * acc
        out.add(min(bisect.bisect_right(pref, r), len(lam) - 1))
    return sorted(out)


OBLIVIOUS = "oblivious"
ADAPTIVE = "adaptive"


@dataclass
class WindowLog:
    build: int
    ops: int
    core_changes: int
    c0: float


class CutDecomposition:
    """Dynamic min s-t cut via sampled j-trees.

    oblivious: t trees are sampled (proportional to lambda) at build time and
    only those are maintained.  adaptive: all trees are maintained and t of
    them are sampled afresh at every query.  Everything is rebuilt after j
    operations (updates, and two terminal additions per query).
    """

    def __init__(self, g: DynamicGraph, j=None, mode=OBLIVIOUS, seed=0, t=None, k=None, e_rule="min", core_eps=None):
        if mode not in (OBLIVIOUS, ADAPTIVE):
            raise ValueError(mode)
        self.g = g
        self.mode = mode
        self.seed = seed
        self._j = j
        self._t = t
        self.k = k
        self.e_rule = e_rule
        self.core_eps = core_eps
        self._sparse: dict = {}
        self.builds = 0
        self.queries = 0
        self.windows: list = []
        self.rng = random.Random(f"jtree:{seed}")
        self.build()

    def _default_j(self, m):
        p = 2.0 / 3.0 if self.mode == OBLIVIOUS else 0.75
        return max(1, int(math.ceil(max(m, 1) ** p)))

    def build(self):
        view = self.g.snapshot()
        self.j = self._j or self._default_j(view.m)
        self.t = self._t or max(1, int(math.ceil(math.log2(max(self.g.n, 2)))))
        self.result = mwu_cut_decomposition(view, self.j, self.k, self.e_rule)
        self.rho_emp = self.result.rho_emp
        self.m0 = max(view.m, 1)
        if self.mode == OBLIVIOUS:
            idx = sample_indices(self.result.lam, self.t, self.rng)
            self.active = [self.result.trees[i] for i in idx]
        else:
            self.active = list(self.result.trees)
        self.builds += 1
        self.ops = 0
        for jt in self.active:
            jt.recourse = 0
        self._sparse = {}

    def _tick(self, n_ops=1):
        self.ops += n_ops
        if self.ops >= self.j:
            self._close_window()
            self.build()

    def _close_window(self):
        ch = max((jt.recourse for jt in self.active), default=0)
        scale = self.m0 * self.g.n / self.j
        self.windows.append(WindowLog(self.builds, self.ops, ch, ch / scale if scale else 0.0))

    def c0(self):
        logs = list(self.windows)
        if self.ops:
            ch = max((jt.recourse for jt in self.active), default=0)
            scale = self.m0 * self.g.n / self.j
            logs.append(WindowLog(self.builds, self.ops, ch, ch / scale))
        return max((w.c0 for w in logs), default=0.0)

    def insert(self, u, v, w):
        rec = self.g.insert_edge(u, v, w)
        for jt in (self.result.trees if self.mode == ADAPTIVE else self.active):
            jt.insert(rec)
        self._tick()
        return rec

    def delete(self, eid):
        if eid not in self.g.edges:
            raise UnknownEdge(eid)
        rec = self.g.delete_edge(eid)
        for jt in (self.result.trees if self.mode == ADAPTIVE else self.active):
            jt.delete(rec)
        self._tick()
        return rec

    def _core_for(self, jt, pos):
        """Exact core unless core_eps is set.  Oblivious mode reuses a
        sparsified core until ceil(|C|/4) core changes have accumulated;
        adaptive mode samples a fresh one with fresh randomness."""
        if self.core_eps is None:
            return None
        if self.mode == ADAPTIVE:
            rng = random.Random(f"core:{self.seed}:{self.builds}:{self.queries}:{pos}")
            return er_cut_sparsify(jt.core_view(), self.core_eps, rng)
        hit = self._sparse.get(pos)
        if hit is None or jt.recourse - hit[0] >= max(1, math.ceil(len(jt.C) / 4)):
            rng = random.Random(f"core:{self.seed}:{self.builds}:{pos}:{jt.recourse}")
            hit = (jt.recourse, er_cut_sparsify(jt.core_view(), self.core_eps, rng))
            self._sparse[pos] = hit
        return hit[1]

    def query(self, s, t, want_cut=False):
        if s == t:
            raise ValueError("s and t must differ")
        self.queries += 1
        if self.mode == OBLIVIOUS:
            pool = self.active
        else:
            qrng = random.Random(f"jtree-q:{self.seed}:{self.builds}:{self.queries}")
            idx = sample_indices(self.result.lam, self.t, qrng)
            pool = [self.result.trees[i] for i in idx]
        best = None
        for pos, jt in enumerate(pool):
            jt.add_terminal(s)
            jt.add_terminal(t)
            val, side = jt.min_cut(s, t, self._core_for(jt, pos))
            if best is None or val < best[0]:
                best = (val, side, jt)
        val, side, jt = best
        cut = jt.expand(side) if want_cut else None
        # two AddTerminal operations happened on every maintained tree
        if self.mode == ADAPTIVE:
            for other in self.result.trees:
                other.add_terminal(s)
                other.add_terminal(t)
        self._tick(2)
        return (val, cut) if want_cut else val


def build_decomposition(view, j=None, mode=OBLIVIOUS, seed=0, **kw) -> CutDecomposition:
    v = as_view(view)
    g = DynamicGraph(v.n, max_ratio=None)
    for e in v.edges:
        g.insert_edge(e.u, e.v, e.w)
    return CutDecomposition(g, j=j, mode=mode, seed=seed, **kw)


def min_cut_query(dec: CutDecomposition, s, t, want_cut=False):
    return dec.query(s, t, want_cut=want_cut)
