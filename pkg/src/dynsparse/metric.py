"""Metric j-trees and fully dynamic all-pairs shortest paths.

A metric j-tree J = T + F is a spanning tree plus a few extra edges of G.
G embeds into J by routing each remaining edge along its tree path; the
stretch of e is eta_J(e) = d_T(u, v) / l(e) (1 for edges of T and F).
A multiplicative-weights loop builds a distribution over such J whose
average stretch is small on every edge.  Distances between terminals are
answered on the Route1 sparsifier H_C of each sampled J.
"""
from __future__ import annotations

import bisect
import heapq
import math
import random
from dataclasses import dataclass, field

from .graph import DynamicGraph, GraphView, UnknownEdge, as_view
from .jtree import SkeletonTreeIndex, lmax, sample_indices, softmax
from .lsst import RootedForest, generalized_lsst


class NonTermination(RuntimeError):
    pass


@dataclass
class MetricJTree:
    view: GraphView
    tree: list  # edge ids
    F: set
    forest: RootedForest
    stretch: dict  # eid -> eta_J(e)

    @property
    def eta(self):
        return max(self.stretch.values(), default=1.0)

    def psi(self):
        h = self.eta
        return {i for i, s in self.stretch.items() if s >= 0.5 * h}

    def as_view(self) -> GraphView:
        keep = set(self.tree) | self.F
        return GraphView(self.view.n, [e for e in self.view.edges if e.id in keep])


@dataclass
class GoodJ1:
    jtree: MetricJTree
    volume: float  # w(J) = sum_e w_e l_J(e)
    base_volume: float  # w(G)
    alpha_emp: float
    target: int


def _off_tree_stretch(view, forest, tree):
    ts = set(tree)
    # an edge longer than its tree path counts as stretch 1 (lowest bucket)
    return {e.id: max(1.0, forest.distance(e.u, e.v) / e.w) for e in view.edges if e.id not in ts and e.u != e.v}


def compute_good_j1(view, k, w=None, alpha=None) -> GoodJ1:
    """Spanning tree T and extra edges F so that |psi(J)| >= 4 alpha m / k.

    w: importance per edge id (default uniform).  alpha: the stretch
    budget used for the psi target (default: the measured weighted ratio).
    """
    view = as_view(view)
    if k < 1:
        raise ValueError("k must be >= 1")
    edges = [e for e in view.edges if e.u != e.v]
    m = len(edges)
    if w is None:
        w = {e.id: 1.0 for e in edges}
    lengths = {e.id: e.w for e in edges}
    res = generalized_lsst(GraphView(view.n, edges), lengths, w)
    forest = res.forest
    off = _off_tree_stretch(GraphView(view.n, edges), forest, res.tree)
    if alpha is None:
        alpha = max(res.weighted_ratio, 1.0)
    target = int(math.ceil(4.0 * alpha * m / k))
    F = set()
    rest = sorted((s, i) for i, s in off.items())
    vals = [s for s, _ in rest]
    base = len(res.tree) + len(F)
    if target > m:
        p = len(rest)
    else:
        p = len(rest)
        for q in range(len(rest) + 1):
            # the q largest stretches move to F
            hi = len(rest) - q
            eta = max(1.0, vals[hi - 1]) if hi else 1.0
            cnt = hi - bisect.bisect_left(vals, 0.5 * eta, 0, hi)
            if eta <= 2.0:
                cnt += base + q
            if cnt >= target:
                p = q
                break
    for s, i in rest[len(rest) - p:]:
        F.add(i)
    stretch = {e.id: 1.0 for e in edges}
    for i, s in off.items():
        if i not in F:
            stretch[i] = s
    jt = MetricJTree(GraphView(view.n, edges), list(res.tree), F, forest, stretch)
    vol = math.fsum(w[e.id] * e.w * stretch[e.id] for e in edges)
    base_vol = math.fsum(w[e.id] * e.w for e in edges)
    return GoodJ1(jt, vol, base_vol, res.weighted_ratio, target)


@dataclass
class LmaxState:
    x: list

    def lmax(self):
        return lmax(self.x) if self.x else 0.0

    def partials(self):
        return softmax(self.x)

    def phi(self):
        return math.fsum(math.exp(v) for v in self.x)


@dataclass
class MetricDecomposition:
    lam: list
    trees: list  # MetricJTree
    rho_emp: float  # max_e (M lam)_e
    alpha: float
    k: int
    iterations: int
    state: LmaxState
    restarts: int = 0
    rows: list = field(default_factory=list)

    def lmax(self):
        return self.state.lmax()


def default_k(m, alpha, j):
    return max(int(math.ceil(4 * alpha * m / max(j, 1))), int(math.ceil(4 * alpha)) + 1)


def mwu_metric_decomposition(view, k=None, j=None) -> MetricDecomposition:
    """Distribution over metric j-trees with lmax(M lam) <= 3 alpha.

    alpha starts at max(ln m, 1) and doubles (restarting the loop) whenever
    a candidate's weighted stretch exceeds it.
    """
    view = as_view(view)
    edges = [e for e in view.edges if e.u != e.v]
    m = len(edges)
    if m == 0:
        raise ValueError("graph has no edges")
    alpha = max(math.log(m), 1.0)
    restarts = 0
    while True:
        kk = k if k is not None else default_k(m, alpha, j or max(1, int(math.ceil(m ** (2.0 / 3.0)))))
        st = LmaxState([0.0] * m)
        lam, trees, rows = [], [], []
        ok = True
        it = 0
        while math.fsum(lam) < 1.0:
            it += 1
            if it > 2 * kk:
                raise NonTermination(f"more than {2 * kk} iterations")
            p = st.partials()
            w = {e.id: p[i] / e.w for i, e in enumerate(edges)}
            good = compute_good_j1(GraphView(view.n, edges), kk, w, alpha=alpha)
            row = [good.jtree.stretch[e.id] for e in edges]
            if math.fsum(p[i] * row[i] for i in range(m)) > alpha * (1 + 1e-12):
                ok = False
                break
            eta = max(row)
            delta = min(1.0 / eta, 1.0 - math.fsum(lam))
            lam.append(delta)
            trees.append(good.jtree)
            rows.append(row)
            for i in range(m):
                st.x[i] += delta * row[i]
        if ok:
            return MetricDecomposition(lam, trees, max(st.x), alpha, kk, it, st, restarts, rows)
        alpha *= 2
        restarts += 1


# -- Route1 sparsifier ---------------------------------------------------------------

class DistanceCoreSparsifier:
    """H_C of a metric j-tree, maintained under terminal additions and edge
    updates between terminals.

    Edges of H_C: one per skeleton edge (length of the tree path) and one
    per off-tree edge e = (a, b) of G, joining the first terminals met on
    T[a, b] from either side (length: the walk through e).  Images that
    collapse to a single terminal are dropped.
    """

    def __init__(self, jt: MetricJTree, C0=()):
        view = jt.view
        self.n = view.n
        self.forest = jt.forest
        ts = set(jt.tree)
        self.edges = {e.id: e for e in view.edges}
        tree_edges = [(e.u, e.v, e.id, e.w) for e in view.edges if e.id in ts]
        self.tree_ends = {e.id: (e.u, e.v) for e in view.edges if e.id in ts}
        C = set(C0)
        for i in jt.F:
            e = self.edges[i]
            C.update((e.u, e.v))
        self.skeleton = SkeletonTreeIndex(self.n, tree_edges)
        self.C: set = set()
        self.H: dict = {}  # key -> (a, b, length)
        self.walks: dict = {}  # eid -> [path, prefix, lo, hi]
        self.RI = [set() for _ in range(self.n)]
        for e in view.edges:
            if e.id in ts or e.u == e.v:
                continue
            path = self.forest.path_vertices(e.u, e.v)
            pre = [0.0]
            for x, y in zip(path, path[1:]):
                pre.append(pre[-1] + self.forest.distance(x, y))
            self.walks[e.id] = [path, pre, None, None]
            for x in path:
                self.RI[x].add(e.id)
        for u in sorted(C):
            self._add(u, [])
        for i in sorted(self.walks):
            self._refresh(i, [])

    # -- internals ---------------------------------------------------------
    def _set(self, key, val, changes):
        old = self.H.get(key)
        if old == val:
            return
        if old is not None:
            changes.append(("-", key) + old)
            del self.H[key]
        if val is not None:
            self.H[key] = val
            changes.append(("+", key) + val)

    def _refresh(self, eid, changes):
        path, pre, lo, hi = self.walks[eid]
        key = ("e", eid)
        if lo is None or lo == hi:
            self._set(key, None, changes)
            return
        e = self.edges[eid]
        a, b = path[lo], path[hi]
        length = pre[lo] + e.w + (pre[-1] - pre[hi])
        self._set(key, (min(a, b), max(a, b), length), changes)

    def _mark(self, x, changes):
        for eid in sorted(self.RI[x]):
            wk = self.walks[eid]
            pos = wk[0].index(x)
            if wk[2] is None or pos < wk[2]:
                wk[2] = pos
            if wk[3] is None or pos > wk[3]:
                wk[3] = pos
            self._refresh(eid, changes)

    def _add(self, u, changes):
        new, sk = self.skeleton.add(u)
        for op, a, b, ln in sk:
            key = ("s", a, b)
            if op == "-":
                self._set(key, None, changes)
            else:
                self._set(key, (a, b, ln), changes)
        for x in new:
            if x not in self.C:
                self.C.add(x)
                self._mark(x, changes)
        return new

    # -- operations ----------------------------------------------------------
    def add_terminal(self, u) -> list:
        changes = []
        if u in self.C:
            return changes
        self._add(u, changes)
        return changes

    def insert(self, rec) -> list:
        changes = self.add_terminal(rec.u) + self.add_terminal(rec.v)
        self.edges[rec.id] = rec
        self._set(("e", rec.id), (min(rec.u, rec.v), max(rec.u, rec.v), rec.w), changes)
        return changes

    def delete(self, rec) -> list:
        if rec.id not in self.edges:
            raise UnknownEdge(rec.id)
        changes = self.add_terminal(rec.u) + self.add_terminal(rec.v)
        if rec.id in self.tree_ends:
            for op, a, b, ln in self.skeleton.remove_tree_edge(rec.u, rec.v):
                self._set(("s", a, b), None, changes)
            del self.tree_ends[rec.id]
        else:
            self._set(("e", rec.id), None, changes)
            wk = self.walks.pop(rec.id, None)
            if wk is not None:
                for x in wk[0]:
                    self.RI[x].discard(rec.id)
        del self.edges[rec.id]
        return changes

    def as_view(self) -> GraphView:
        return GraphView.from_triples(self.n, [self.H[k] for k in sorted(self.H, key=repr)])

    def distance(self, s, t):
        self.add_terminal(s)
        self.add_terminal(t)
        if s == t:
            return 0.0
        adj: dict = {}
        for a, b, ln in self.H.values():
            adj.setdefault(a, []).append((b, ln))
            adj.setdefault(b, []).append((a, ln))
        dist = {s: 0.0}
        pq = [(0.0, s)]
        while pq:
            d, x = heapq.heappop(pq)
            if x == t:
                return d
            if d > dist[x]:
                continue
            for y, ln in adj.get(x, ()):
                nd = d + ln
                if nd < dist.get(y, math.inf):
                    dist[y] = nd
                    heapq.heappush(pq, (nd, y))
        return math.inf


def route1_sparsifier(jt: MetricJTree, C0=()) -> DistanceCoreSparsifier:
    return DistanceCoreSparsifier(jt, C0)


def mj_add_terminal(h: DistanceCoreSparsifier, u):
    return h.add_terminal(u)


def mj_insert(h: DistanceCoreSparsifier, rec):
    return h.insert(rec)


def mj_delete(h: DistanceCoreSparsifier, rec):
    return h.delete(rec)


# -- dynamic APSP ------------------------------------------------------------------------

class DynamicAPSP:
    """Distances from t = ceil(3 log2 n) metric j-trees sampled by lambda.

    Updates go to every sampled tree; each query adds s and t as terminals
    and takes the minimum over trees.  Rebuilt after j operations.
    """

    def __init__(self, g: DynamicGraph, j=None, seed=0, t=None, k=None):
        self.g = g
        self.seed = seed
        self._j = j
        self._t = t
        self.k = k
        self.builds = 0
        self.rng = random.Random(f"apsp:{seed}")
        self.build()

    def build(self):
        view = self.g.snapshot()
        m = max(view.m, 1)
        self.j = self._j or max(1, int(math.ceil(m ** (2.0 / 3.0))))
        self.t = self._t or max(1, int(math.ceil(3 * math.log2(max(self.g.n, 2)))))
        self.ops = 0
        self.builds += 1
        if view.m == 0:
            self.dec = None
            self.rho_emp = 1.0
            self.active = []
            return
        self.dec = mwu_metric_decomposition(view, self.k, self.j)
        self.rho_emp = self.dec.rho_emp
        idx = sample_indices(self.dec.lam, self.t, self.rng)
        self.active = [DistanceCoreSparsifier(self.dec.trees[i]) for i in idx]

    def _tick(self, n_ops=1):
        self.ops += n_ops
        if self.ops >= self.j:
            self.build()

    def insert(self, u, v, w):
        rec = self.g.insert_edge(u, v, w)
        if self.dec is None:
            self.build()
            return rec
        for h in self.active:
            h.insert(rec)
        self._tick()
        return rec

    def delete(self, eid):
        if eid not in self.g.edges:
            raise UnknownEdge(eid)
        rec = self.g.delete_edge(eid)
        for h in self.active:
            h.delete(rec)
        self._tick()
        return rec

    def query(self, s, t):
        if s == t:
            return 0.0
        best = min((h.distance(s, t) for h in self.active), default=math.inf)
        self._tick(2)
        return best


def apsp_query(structure: DynamicAPSP, s, t):
    return structure.query(s, t)
