"""Dynamic approximate Schur complements from terminal-free random walks,
and a chain of them for effective-resistance queries.

For every base edge e = uv and every slot k < rho we walk from u and from v
until the walk hits the core C.  If the walks end at a != b, the path
w_u + e + w_v contributes an edge ab of weight 1 / (rho * r), with r the
series resistance of the path.  In expectation this is SC(G, C).

New core vertices cut every stored walk at their first occurrence; the
piece that keeps the originating edge stays, the tail is dropped.  The cut
walk has exactly the law of a fresh walk stopped at the larger core, so
the estimate stays unbiased.
"""
from __future__ import annotations

import bisect
import math
import random
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from . import oracles
from .framework import FULLY_DYNAMIC, Hierarchy, HierarchyConfig, PropertyPlugin, VertexSparsifier, _Recorder
from .graph import DynamicGraph, GraphView, UnknownEdge, as_view


# -- Laplacian solver -----------------------------------------------------------

@dataclass
class SolveInfo:
    method: str = ""
    iterations: int = 0


def _sparse_laplacian(view, vertices):
    idx = {v: i for i, v in enumerate(vertices)}
    rows, cols, vals = [], [], []
    diag = np.zeros(len(vertices))
    for e in view.edges:
        a, b = idx.get(e.u), idx.get(e.v)
        if e.u == e.v:
            continue
        # principal submatrix: an edge to a dropped vertex still adds to the diagonal
        if a is not None:
            diag[a] += e.w
        if b is not None:
            diag[b] += e.w
        if a is not None and b is not None:
            rows += [a, b]
            cols += [b, a]
            vals += [-e.w, -e.w]
    k = len(vertices)
    L = scipy.sparse.coo_matrix((vals, (rows, cols)), shape=(k, k)).tocsr()
    return L + scipy.sparse.diags(diag), diag


def effective_resistance(view, s, t, tol=1e-10, info: SolveInfo = None, dense_limit=2000) -> float:
    """ER(s, t) by PCG with a Jacobi preconditioner on the Laplacian
    grounded at t; falls back to dense Cholesky when CG stalls."""
    view = as_view(view)
    if s == t:
        return 0.0
    label = view.components()
    if label[s] != label[t]:
        raise oracles.DifferentComponents((s, t))
    comp = [v for v in range(view.n) if label[v] == label[s] and v != t]
    L, diag = _sparse_laplacian(view, comp)
    b = np.zeros(len(comp))
    i = comp.index(s)
    b[i] = 1.0
    M = scipy.sparse.diags(1.0 / diag)
    it = [0]

    def cb(_):
        it[0] += 1

    x, flag = scipy.sparse.linalg.cg(L, b, rtol=tol, M=M, maxiter=10 * len(comp) + 100, callback=cb)
    if flag == 0:
        if info is not None:
            info.method, info.iterations = "pcg", it[0]
        return float(x[i])
    if len(comp) > dense_limit:
        raise RuntimeError("CG did not converge and the system is too large for the dense fallback")
    x = scipy.linalg.cho_solve(scipy.linalg.cho_factor(L.toarray()), b)
    if info is not None:
        info.method, info.iterations = "cholesky", it[0]
    return float(x[i])


# -- walks ----------------------------------------------------------------------

@dataclass
class Walk:
    verts: list  # verts[0] is the start
    res: list  # res[k] = resistance of the first k steps
    hit: bool  # ended in the core (False: truncated at the distinct cap)

    @property
    def end(self):
        return self.verts[-1]

    def cut(self, pos):
        self.verts = self.verts[: pos + 1]
        self.res = self.res[: pos + 1]
        self.hit = True


@dataclass
class WalkPair:
    eid: int
    slot: int
    c: float  # conductance of the originating edge
    walks: list  # [w_u, w_v]
    scale: float = 1.0  # 1/rho for sampled pairs, 1 for a core-core edge
    key: tuple = None  # current contribution (a, b) or None
    weight: float = 0.0

    def resistance(self):
        return self.walks[0].res[-1] + 1.0 / self.c + self.walks[1].res[-1]


def split_resistance(walk: Walk, pos):
    """Resistances of the two pieces of a walk cut at ``pos``."""
    return walk.res[pos], walk.res[-1] - walk.res[pos]


class _Sampler:
    """Weight-proportional neighbour sampling on a frozen graph."""

    def __init__(self, g: DynamicGraph):
        self.nbrs = {}
        self.g = g

    def table(self, x):
        t = self.nbrs.get(x)
        if t is None:
            ys, cum, rs = [], [], []
            acc = 0.0
            for eid in sorted(self.g.adj[x]):
                rec = self.g.edges[eid]
                acc += rec.w
                ys.append(rec.other(x))
                cum.append(acc)
                rs.append(1.0 / rec.w)
            t = self.nbrs[x] = (ys, cum, rs)
        return t

    def invalidate(self, *xs):
        for x in xs:
            self.nbrs.pop(x, None)


def _walk(sampler, start, core, cap, rng) -> Walk:
    verts, res = [start], [0.0]
    if start in core:
        return Walk(verts, res, True)
    seen = {start}
    x = start
    while True:
        ys, cum, rs = sampler.table(x)
        if not ys:
            return Walk(verts, res, False)
        k = bisect.bisect_right(cum, rng.random() * cum[-1])
        k = min(k, len(ys) - 1)
        x = ys[k]
        verts.append(x)
        res.append(res[-1] + rs[k])
        if x in core:
            return Walk(verts, res, True)
        seen.add(x)
        if len(seen) >= cap:
            return Walk(verts, res, False)


# -- one level ---------------------------------------------------------------------

class SchurSparsifier(VertexSparsifier):
    """Maintains H approximating SC(G, C) with C containing the terminals.

    ``self.graph`` holds H with parallel samples merged: one edge per core
    pair, re-inserted whenever its total weight changes.
    """

    supports_delete = True

    def __init__(self, beta, eps, seed=0, rho=None, promote_heavy=True, sample_core=True):
        super().__init__()
        if not (0 < beta < 1) or not (0 < eps < 1):
            raise ValueError("need 0 < beta < 1 and 0 < eps < 1")
        self.beta = beta
        self.eps = eps
        self.seed = seed
        self._rho = rho
        self.promote_heavy = promote_heavy
        self.sample_core = sample_core
        self.core: set = set()
        self.pairs: dict = {}  # (eid, slot) -> WalkPair
        self.by_edge: dict = {}  # eid -> list of pair ids
        self.index: dict = {}  # vertex -> set of (pair id, side)
        self.contrib: dict = {}  # (a, b) -> {pair id: weight}
        self.hid: dict = {}  # (a, b) -> edge id in self.graph
        self.truncated = 0
        self._dirty: set = set()

    def preprocess(self, base: DynamicGraph, terminals=()):
        self.base = base
        n = base.n
        self.n = n
        m = base.m
        self.rho = self._rho or max(1, int(math.ceil(self.eps ** -2 * math.log(max(n, 2)))))
        self.cap = int(math.ceil(4.0 / self.beta * math.log(max(n, 2))))
        self.graph = DynamicGraph(n, max_ratio=None)
        self.sampler = _Sampler(base)
        rng = random.Random(f"core:{self.seed}")
        self.terminals = set(terminals)
        self.core = set(terminals)
        edges = sorted(base.edges.values(), key=lambda e: e.id)
        if self.sample_core:
            for e in edges:
                if rng.random() < self.beta:
                    self.core.update((e.u, e.v))
        for e in edges:
            self._sample_edge(e)
        if self.promote_heavy:
            occ = {}
            for pid, pair in self.pairs.items():
                for w in pair.walks:
                    for x in w.verts:
                        if x not in self.core:
                            occ[x] = occ.get(x, 0) + 1
            top = sorted(occ.items(), key=lambda kv: (-kv[1], kv[0]))[: int(self.beta * m)]
            self.heavy = [x for x, _ in top]
            for x in self.heavy:
                self._cut_at(x)
        self._flush(set(self.contrib))
        return self

    # -- sampling ----------------------------------------------------------
    def _sample_edge(self, e):
        ids = []
        if e.u in self.core and e.v in self.core:
            # both walks are empty in every slot: the edge itself
            pid = (e.id, 0)
            self.pairs[pid] = WalkPair(e.id, 0, e.w, [Walk([e.u], [0.0], True), Walk([e.v], [0.0], True)])
            self._recompute(pid)
            self.by_edge[e.id] = [pid]
            return
        rng = random.Random(f"walk:{self.seed}:{e.id}")
        for k in range(self.rho):
            wu = _walk(self.sampler, e.u, self.core, self.cap, rng)
            wv = _walk(self.sampler, e.v, self.core, self.cap, rng)
            pid = (e.id, k)
            self.pairs[pid] = WalkPair(e.id, k, e.w, [wu, wv], scale=1.0 / self.rho)
            for side, w in enumerate((wu, wv)):
                if not w.hit:
                    self.truncated += 1
                for x in w.verts:
                    if x not in self.core:
                        self.index.setdefault(x, set()).add((pid, side))
            self._recompute(pid)
            ids.append(pid)
        self.by_edge[e.id] = ids

    def _recompute(self, pid):
        pair = self.pairs[pid]
        if pair.key is not None:
            d = self.contrib[pair.key]
            d.pop(pid, None)
            self._dirty.add(pair.key)
        pair.key = None
        a, b = pair.walks[0].end, pair.walks[1].end
        if pair.walks[0].hit and pair.walks[1].hit and a != b:
            key = (a, b) if a < b else (b, a)
            pair.key = key
            pair.weight = pair.scale / pair.resistance()
            self.contrib.setdefault(key, {})[pid] = pair.weight
            self._dirty.add(key)

    def _cut_at(self, x):
        self.core.add(x)
        for pid, side in sorted(self.index.pop(x, ())):
            pair = self.pairs.get(pid)
            if pair is None:
                continue
            w = pair.walks[side]
            pos = w.verts.index(x)
            for y in w.verts[pos + 1:]:
                if y not in self.core and y not in w.verts[: pos + 1]:
                    s = self.index.get(y)
                    if s is not None:
                        s.discard((pid, side))
            w.cut(pos)
            self._recompute(pid)

    def _flush(self, keys):
        keys = set(keys) | self._dirty
        self._dirty.clear()
        for key in sorted(keys):
            old = self.hid.pop(key, None)
            if old is not None:
                self.graph.delete_edge(old)
            d = self.contrib.get(key)
            if d:
                w = math.fsum(d[p] for p in sorted(d))
                if w > 0:
                    self.hid[key] = self.graph.insert_edge(key[0], key[1], w).id
            else:
                self.contrib.pop(key, None)

    # -- operations --------------------------------------------------------
    def _add_terminal(self, u):
        self.terminals.add(u)
        if u in self.core:
            return
        self._cut_at(u)
        self._flush(())

    def add_terminal(self, u):
        if u in self.terminals:
            return []
        return super().add_terminal(u)

    def insert(self, rec):
        with _Recorder(self.graph) as ev:
            self._promote(rec.u)
            self._promote(rec.v)
            self.sampler.invalidate(rec.u, rec.v)
            self._sample_edge(rec)
            self._flush(())
        self.recourse += len(ev)
        return ev

    def delete(self, rec):
        if rec.id not in self.by_edge:
            raise UnknownEdge(rec.id)
        with _Recorder(self.graph) as ev:
            self._promote(rec.u)
            self._promote(rec.v)
            self.sampler.invalidate(rec.u, rec.v)
            for pid in self.by_edge.pop(rec.id):
                pair = self.pairs.pop(pid)
                if pair.key is not None:
                    self.contrib[pair.key].pop(pid, None)
                    self._dirty.add(pair.key)
                for side, w in enumerate(pair.walks):
                    for x in w.verts:
                        s = self.index.get(x)
                        if s is not None:
                            s.discard((pid, side))
            self._flush(())
        self.recourse += len(ev)
        return ev

    def _promote(self, u):
        if u not in self.terminals:
            self._add_terminal(u)

    # -- diagnostics -------------------------------------------------------
    def occurrences(self) -> dict:
        occ = {}
        for pair in self.pairs.values():
            for w in pair.walks:
                for x in w.verts:
                    if x not in self.core:
                        occ[x] = occ.get(x, 0) + 1
        return occ

    def weight_ratio(self):
        return self.graph.weight_ratio


class ExactSchurSparsifier(VertexSparsifier):
    """H = SC(G, C) computed densely after every change (cross-check mode).
    Components of G that miss C are dropped."""

    supports_delete = True

    def __init__(self, beta=0.5, seed=0, sample_core=True):
        super().__init__()
        self.beta = beta
        self.seed = seed
        self.sample_core = sample_core
        self.hid: dict = {}

    def preprocess(self, base, terminals=()):
        self.base = base
        self.graph = DynamicGraph(base.n, max_ratio=None)
        self.terminals = set(terminals)
        self.core = set(terminals)
        if self.sample_core:
            rng = random.Random(f"core:{self.seed}")
            for e in sorted(base.edges.values(), key=lambda e: e.id):
                if rng.random() < self.beta:
                    self.core.update((e.u, e.v))
        self._sync()
        return self

    def _sync(self):
        view = self.base.snapshot()
        label = view.components()
        core = sorted(self.core)
        hit = {label[c] for c in core}
        keep = [v for v in range(view.n) if label[v] in hit]
        target = {}
        if core:
            sub = GraphView(view.n, [e for e in view.edges if label[e.u] in hit])
            # vertices outside the kept components are isolated here and in C's
            # complement; drop them by solving on the kept part only
            S = _schur_on(sub, core, keep)
            for a, b, w in S.triples():
                target[(a, b)] = w
        for key in sorted(set(self.hid) | set(target)):
            old = self.hid.get(key)
            new = target.get(key)
            if old is not None and new is not None and self.graph.edges[old].w == new:
                continue
            if old is not None:
                self.graph.delete_edge(self.hid.pop(key))
            if new is not None:
                self.hid[key] = self.graph.insert_edge(key[0], key[1], new).id

    def _add_terminal(self, u):
        self.terminals.add(u)
        if u not in self.core:
            self.core.add(u)
            self._sync()

    def insert(self, rec):
        with _Recorder(self.graph) as ev:
            self.terminals.update((rec.u, rec.v))
            self.core.update((rec.u, rec.v))
            self._sync()
        self.recourse += len(ev)
        return ev

    def delete(self, rec):
        return self.insert(rec)


def _schur_on(view, core, keep):
    cset = set(core)
    D = [v for v in keep if v not in cset]
    L = oracles.laplacian(view, list(core) + D)
    k = len(core)
    if D:
        X = scipy.linalg.solve(L[k:, k:], L[k:, :k], assume_a="pos")
        S = L[:k, :k] - L[:k, k:] @ X
        S = 0.5 * (S + S.T)
    else:
        S = L
    return oracles.DenseLaplacian(tuple(core), S)


# -- wrappers ---------------------------------------------------------------------------

def _as_dynamic(view):
    if isinstance(view, DynamicGraph):
        return view
    v = as_view(view)
    g = DynamicGraph(v.n, max_ratio=None)
    for e in v.edges:
        g.insert_edge(e.u, e.v, e.w)
    return g


def sc_initialize(view, T, beta, eps, seed=0, **kw) -> SchurSparsifier:
    return SchurSparsifier(beta, eps, seed, **kw).preprocess(_as_dynamic(view), sorted(T))


def sc_add_terminal(level: SchurSparsifier, u) -> list:
    return level.add_terminal(u)


def sc_update_edge(level: SchurSparsifier, op, *args) -> list:
    """op "I" with (u, v, w) or "D" with (edge id,) applied to the base graph."""
    g = level.base
    if op == "I":
        rec = g.insert_edge(*args)
        return level.insert(rec)
    if op == "D":
        eid = args[0]
        if eid not in g.edges:
            raise UnknownEdge(eid)
        rec = g.delete_edge(eid)
        return level.delete(rec)
    raise ValueError(op)


# -- the chain ------------------------------------------------------------------------------

def default_beta(n, depth):
    return float(max(n, 2)) ** (-1.0 / (3 * depth + 3))


class SchurChain:
    """G_0 = G and G_{i+1} ~ SC(G_i, C_i) for i < depth; ER is solved on G_depth.

    Level i+1 is rebuilt from a snapshot of G_i every ceil(beta * m_i)
    operations (deeper levels cascade).  ``exact=True`` swaps the sampled
    levels for dense exact Schur complements.
    """

    def __init__(self, g: DynamicGraph, depth=1, eps=0.25, beta=None, seed=0, exact=False, tol=None, rho=None):
        self.g = g
        self.depth = depth
        self.eps = eps
        self.beta = default_beta(g.n, depth) if beta is None else beta
        self.seed = seed
        self.exact = exact
        self.tol = eps / 10 if tol is None else tol
        self.builds = 0
        self.solve_info = SolveInfo()
        self.h = None
        if depth > 0:
            m = max(g.m, 1)
            sizes = [m] + [max(1, int(math.ceil(self.beta ** i * m))) for i in range(1, depth + 1)]
            cfg = HierarchyConfig(
                depth, sizes, mode=FULLY_DYNAMIC,
                threshold_fn=lambda i, base: max(1, int(math.ceil(self.beta * base.m))),
            )
            plugin = PropertyPlugin("er", self._solve, "min", math.inf)
            self.h = Hierarchy(g, cfg, self._factory, plugin)

    def _factory(self, level):
        self.builds += 1
        s = hash((self.seed, level, self.builds)) & 0xFFFFFFFF
        if self.exact:
            return ExactSchurSparsifier(self.beta, seed=s)
        return SchurSparsifier(self.beta, self.eps, seed=s)

    def _solve(self, view, s, t):
        return effective_resistance(view, s, t, tol=self.tol, info=self.solve_info)

    def insert(self, u, v, w):
        if self.h is None:
            return self.g.insert_edge(u, v, w)
        return self.h.insert(u, v, w)

    def delete(self, eid):
        if eid not in self.g.edges:
            raise UnknownEdge(eid)
        if self.h is None:
            return self.g.delete_edge(eid)
        return self.h.delete(eid)

    def query(self, s, t):
        if s == t:
            return 0.0
        label = self.g.snapshot().components()
        if label[s] != label[t]:
            raise oracles.DifferentComponents((s, t))
        if self.h is None:
            return self._solve(self.g.snapshot(), s, t)
        return self.h.query(s, t)

    def rebuilds(self):
        return [] if self.h is None else list(self.h.rebuild_log)

    def sizes(self):
        return [self.g.m] + ([] if self.h is None else [l.d.graph.m for l in self.h.levels])


def chain_query_er(chain: SchurChain, s, t) -> float:
    return chain.query(s, t)


def chain_rebuild_policy(chain: SchurChain):
    """Thresholds per level, ceil(beta * m_i); rebuilds fire inside updates."""
    if chain.h is None:
        return []
    return [l.threshold for l in chain.h.levels]
