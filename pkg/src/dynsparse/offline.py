"""Offline dynamic processing over an interval decomposition tree.

Every edge has a lifetime [i_e, d_e].  A node with interval [r, s] calls
an edge *permanent* when it is alive for the whole interval and untouched
inside it (i_e < r and s < d_e); edges inserted or deleted inside the
interval are *non-permanent*.  Permanent edges of a node that were not
permanent at its parent form the node's new-permanent set H.  Boundary
vertices are the endpoints of non-permanent edges plus query endpoints.

Sparsifiers flow top-down: G'' = G'(parent) + H, then G' = plugin(G'', boundary).
Leaves replay their own events on a copy of G' plus the non-permanent
edges alive at the start of the leaf.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from . import oracles
from .graph import EdgeRecord, GraphView, UnknownEdge
from .tz import TzIvs
from .graph import DynamicGraph


class PluginError(RuntimeError):
    def __init__(self, node, err):
        super().__init__(f"plugin failed at node [{node.lo},{node.hi}] level {node.level}: {err!r}")
        self.node = node
        self.err = err


class TerminalNotLeaf(ValueError):
    pass


# -- event sequences -----------------------------------------------------------

@dataclass
class Event:
    kind: str  # "I", "D", "Q" or "N" (padding no-op)
    u: int = -1
    v: int = -1
    w: float = 0.0
    eid: int = -1


@dataclass
class Lifetime:
    eid: int
    u: int
    v: int
    w: float
    ins: int
    dele: int


@dataclass
class EventSequence:
    n: int
    events: list  # events[t-1] happens at time t
    edges: dict  # eid -> Lifetime
    length: int = 0  # length before padding

    @property
    def m(self):
        return len(self.events)

    def queries(self):
        return [(t, e.u, e.v) for t, e in enumerate(self.events, 1) if e.kind == "Q"]


def normalize(n, ops) -> EventSequence:
    """ops: ("I", u, v, w) | ("D", id) | ("DUV", u, v) | ("Q", s, t).

    Insertions get ids 0, 1, 2, ... in order (the ids a DynamicGraph would
    hand out), so "D id" refers to the id-th insertion.  Every insertion is
    its own edge instance; instances still alive at the end receive a
    deletion at time m + 1.
    """
    events, edges, live = [], {}, {}
    nxt = 0
    for t, op in enumerate(ops, 1):
        kind = op[0]
        if kind == "I":
            _, u, v, w = op
            if u == v:
                raise ValueError("self loops are not allowed")
            if not w > 0:
                raise ValueError("weights must be positive")
            eid = nxt
            nxt += 1
            edges[eid] = Lifetime(eid, int(u), int(v), float(w), t, math.inf)
            live[eid] = edges[eid]
            events.append(Event("I", int(u), int(v), float(w), eid))
        elif kind in ("D", "DUV"):
            if kind == "D":
                eid = int(op[1])
            else:
                a, b = int(op[1]), int(op[2])
                cand = [e for e in live.values() if {e.u, e.v} == {a, b}]
                if not cand:
                    raise UnknownEdge((a, b))
                eid = min(e.eid for e in cand)
            lt = live.pop(eid, None)
            if lt is None:
                raise UnknownEdge(eid)
            lt.dele = t
            events.append(Event("D", lt.u, lt.v, lt.w, eid))
        elif kind == "Q":
            events.append(Event("Q", int(op[1]), int(op[2])))
        elif kind == "N":
            events.append(Event("N"))
        else:
            raise ValueError(f"unknown event {kind!r}")
    end = len(events) + 1
    for lt in live.values():
        lt.dele = end
    return EventSequence(n, events, edges, len(events))


# -- the decomposition tree ------------------------------------------------------

@dataclass
class DecompositionNode:
    lo: int
    hi: int
    level: int
    parent: "DecompositionNode" = None
    permanent: set = field(default_factory=set)
    nonpermanent: set = field(default_factory=set)
    new_permanent: set = field(default_factory=set)
    boundary: set = field(default_factory=set)
    children: list = field(default_factory=list)
    sparsifier: GraphView = None
    quality: float = 1.0  # accumulated quality along the root path

    def is_leaf(self):
        return not self.children


@dataclass
class DecompositionTree:
    seq: EventSequence
    betas: list
    root: DecompositionNode
    levels: list  # nodes per level

    def leaves(self):
        return self.levels[-1]

    def nodes(self):
        for lvl in self.levels:
            yield from lvl


def default_betas(m, levels):
    """beta_i = b^(l+1-i) with b = ceil(m^(1/(l+1)))."""
    b = max(2, int(math.ceil(m ** (1.0 / (levels + 1)) - 1e-9)))
    return [b ** (levels + 1 - i) for i in range(levels + 1)]


def build_decomposition_tree(seq: EventSequence, betas=None, levels=1) -> DecompositionTree:
    """betas = [beta_0, beta_1, ..., beta_l]; beta_0 is replaced by the padded
    sequence length.  Each beta_{i+1} must divide beta_i for i >= 1."""
    if betas is None:
        betas = default_betas(max(seq.m, 1), levels)
    betas = list(betas)
    if len(betas) < 2:
        raise ValueError("need at least one level below the root")
    for a, b in zip(betas[1:], betas[2:]):
        if a % b:
            raise ValueError(f"beta {b} does not divide {a}")
    step = betas[1]
    pad = (-seq.m) % step if seq.m else step
    seq.events.extend(Event("N") for _ in range(pad))
    m = seq.m
    betas[0] = m
    # lifetimes ending past the old end move to the new end + 1
    for lt in seq.edges.values():
        if lt.dele > seq.length:
            lt.dele = max(lt.dele, m + 1)
    root = DecompositionNode(1, m, 0)
    levels_out = [[root]]
    for i in range(1, len(betas)):
        cur = []
        for par in levels_out[-1]:
            for lo in range(par.lo, par.hi + 1, betas[i]):
                ch = DecompositionNode(lo, lo + betas[i] - 1, i, parent=par)
                par.children.append(ch)
                cur.append(ch)
        levels_out.append(cur)
    # one pass over the edges per node; fine at the sizes we run
    life = list(seq.edges.values())
    qs = seq.queries()
    for lvl in levels_out:
        for node in lvl:
            r, s = node.lo, node.hi
            for lt in life:
                if lt.ins < r and s < lt.dele:
                    node.permanent.add(lt.eid)
                elif (r <= lt.ins <= s) or (r <= lt.dele <= s):
                    node.nonpermanent.add(lt.eid)
            for eid in node.nonpermanent:
                lt = seq.edges[eid]
                node.boundary.update((lt.u, lt.v))
            for t, a, b in qs:
                if r <= t <= s:
                    node.boundary.update((a, b))
            if node.parent is not None:
                node.new_permanent = node.permanent - node.parent.permanent
                if len(node.new_permanent) > len(node.parent.nonpermanent):
                    raise AssertionError("new-permanent bound violated")
    return DecompositionTree(seq, betas, root, levels_out)


# -- static sparsifier plugins -------------------------------------------------------

class IdAllocator:
    def __init__(self, start):
        self.next = start

    def __call__(self):
        x = self.next
        self.next += 1
        return x


class IdentityPlugin:
    name = "identity"
    solver = staticmethod(oracles.exact_distance)

    def __init__(self, solver=None):
        if solver is not None:
            self.solver = solver

    def sparsify(self, view, terminals, alloc):
        return view, 1.0


class DistancePlugin:
    name = "distance"
    solver = staticmethod(oracles.exact_distance)

    def __init__(self, r=2):
        self.r = r

    def sparsify(self, view, terminals, alloc):
        g = DynamicGraph(view.n, max_ratio=None)
        for e in view.edges:
            g.insert_edge(e.u, e.v, e.w)
        ivs = TzIvs(self.r).preprocess(g)
        for u in sorted(terminals):
            ivs.add_terminal(u)
        return ivs.current_sparsifier(), float(2 * self.r - 1)


class FlowPlugin:
    name = "flow"
    solver = staticmethod(oracles.min_cut_value)

    def __init__(self):
        self.qualities = []

    def sparsify(self, view, terminals, alloc):
        tree = build_raecke_tree(view, alloc, keep=terminals)
        self.qualities.append(tree.quality)
        h = flow_vertex_sparsify(tree, terminals)
        return h, tree.quality


def _view_over(n, edges):
    return GraphView(n, [EdgeRecord(i, e.u, e.v, e.w) for i, e in enumerate(edges)])


def propagate_sparsifiers(tree: DecompositionTree, plugin) -> DecompositionTree:
    seq = tree.seq
    alloc = IdAllocator(seq.n)
    tree.root.sparsifier = GraphView(seq.n, [])
    tree.root.quality = 1.0
    tree.alloc = alloc
    for lvl in tree.levels[1:]:
        for node in lvl:
            par = node.parent
            extra = [seq.edges[eid] for eid in sorted(node.new_permanent)]
            edges = list(par.sparsifier.edges) + [EdgeRecord(0, lt.u, lt.v, lt.w) for lt in extra]
            g2 = _view_over(alloc.next, edges)
            try:
                h, q = plugin.sparsify(g2, node.boundary, alloc)
            except Exception as err:  # attach the node for debugging
                raise PluginError(node, err) from err
            node.sparsifier = h
            node.quality = par.quality * q
    return tree


def run_offline(seq: EventSequence, tree: DecompositionTree, solver=None) -> list:
    """Answers to the queries of the sequence, in order."""
    if solver is None:
        solver = oracles.exact_distance
    answers = []
    for leaf in tree.leaves():
        base = list(leaf.sparsifier.edges)
        work = {}
        for eid in leaf.nonpermanent:
            lt = seq.edges[eid]
            if lt.ins < leaf.lo <= lt.dele:
                work[eid] = lt
        n = max(leaf.sparsifier.n, seq.n)
        for t in range(leaf.lo, leaf.hi + 1):
            ev = seq.events[t - 1]
            if ev.kind == "I":
                work[ev.eid] = seq.edges[ev.eid]
            elif ev.kind == "D":
                work.pop(ev.eid, None)
            elif ev.kind == "Q":
                if ev.u == ev.v:
                    answers.append(0.0)
                    continue
                edges = base + [EdgeRecord(0, lt.u, lt.v, lt.w) for _, lt in sorted(work.items())]
                answers.append(solver(_view_over(n, edges), ev.u, ev.v))
    return answers


def offline_answers(n, ops, plugin, levels=1, betas=None):
    seq = normalize(n, ops)
    tree = build_decomposition_tree(seq, betas=betas, levels=levels)
    propagate_sparsifiers(tree, plugin)
    return run_offline(seq, tree, plugin.solver), tree


# -- tree flow sparsifiers --------------------------------------------------------------

@dataclass
class RaeckeTree:
    root: int
    parent: dict  # node -> parent (root absent)
    weight: dict  # node -> weight of the edge to its parent
    children: dict
    leaves: frozenset
    cluster: dict = field(default_factory=dict)  # node -> frozenset of leaves below
    quality: float = 1.0
    q_up: float = 1.0
    q_low: float = 1.0

    def nodes(self):
        return [self.root] + list(self.parent)

    def degree(self, x):
        return len(self.children.get(x, ())) + (0 if x == self.root else 1)

    def max_degree(self):
        return max((self.degree(x) for x in self.nodes()), default=0)

    def depth(self, x):
        d = 0
        while x != self.root:
            x = self.parent[x]
            d += 1
        return d

    def height(self):
        return max((self.depth(x) for x in self.leaves), default=0)

    def path_to_root(self, x):
        out = [x]
        while x != self.root:
            x = self.parent[x]
            out.append(x)
        return out

    def path(self, a, b):
        """Tree edges (as child nodes) on the a-b path."""
        pa, pb = self.path_to_root(a), self.path_to_root(b)
        sb = set(pb)
        out = []
        for x in pa:
            if x in sb:
                lca = x
                break
            out.append(x)
        for x in pb:
            if x == lca:
                break
            out.append(x)
        return out

    def as_view(self, n=None, skip_zero=True) -> GraphView:
        if n is None:
            n = max(self.nodes()) + 1
        trip = [(x, p, self.weight[x]) for x, p in sorted(self.parent.items()) if not (skip_zero and self.weight[x] <= 0)]
        return GraphView.from_triples(n, trip)

    def _fill_clusters(self):
        out = {}
        order = sorted(self.nodes(), key=self.depth, reverse=True)
        for x in order:
            if x in self.leaves:
                out[x] = frozenset([x])
            else:
                s = set()
                for c in self.children.get(x, ()):
                    s |= out[c]
                out[x] = frozenset(s)
        self.cluster = out


def _spectral_split(verts, adj_w):
    """Split a connected vertex list in two halves by the Fiedler vector."""
    k = len(verts)
    if k == 2:
        return [verts[:1], verts[1:]]
    idx = {v: i for i, v in enumerate(verts)}
    L = np.zeros((k, k))
    for v in verts:
        for y, w in adj_w[v].items():
            j = idx.get(y)
            if j is not None:
                i = idx[v]
                L[i, j] -= w
                L[i, i] += w
    # normalized Laplacian keeps heavy vertices from dominating
    d = np.sqrt(np.maximum(np.diag(L), 1e-300))
    N = L / d[:, None] / d[None, :]
    _, vecs = np.linalg.eigh(N)
    f = vecs[:, 1] / d
    order = sorted(range(k), key=lambda i: (f[i], verts[i]))
    # best ratio cut among reasonably balanced prefixes
    best, best_i = math.inf, k // 2
    inside = set()
    cut = 0.0
    lo, hi = max(1, k // 4), max(1, k - k // 4)
    for pos in range(k - 1):
        v = verts[order[pos]]
        for y, w in adj_w[v].items():
            if y in idx:
                cut += -w if y in inside else w
        inside.add(v)
        size = pos + 1
        if lo <= size <= hi:
            ratio = cut / min(size, k - size)
            if ratio < best - 1e-12:
                best, best_i = ratio, size
    left = [verts[i] for i in order[:best_i]]
    right = [verts[i] for i in order[best_i:]]
    return [sorted(left), sorted(right)]


def _components(verts, adj_w):
    vs = set(verts)
    seen, out = set(), []
    for s in sorted(vs):
        if s in seen:
            continue
        comp, stack = [], [s]
        seen.add(s)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in adj_w[x]:
                if y in vs and y not in seen:
                    seen.add(y)
                    stack.append(y)
        out.append(sorted(comp))
    return out


def build_raw_tree(view, alloc, keep=()):
    """Hierarchical decomposition by components then spectral bisection.
    Leaves are the vertices touched by edges plus ``keep``; the edge above
    a cluster carries its boundary capacity."""
    adj_w = {}
    verts = set(keep)
    for e in view.edges:
        if e.u == e.v:
            continue
        verts.update((e.u, e.v))
        adj_w.setdefault(e.u, {})
        adj_w.setdefault(e.v, {})
        adj_w[e.u][e.v] = adj_w[e.u].get(e.v, 0.0) + e.w
        adj_w[e.v][e.u] = adj_w[e.v].get(e.u, 0.0) + e.w
    for v in verts:
        adj_w.setdefault(v, {})
    verts = sorted(verts)
    parent, weight, children = {}, {}, {}

    def boundary(cl):
        s = set(cl)
        return float(sum(w for v in cl for y, w in adj_w[v].items() if y not in s))

    def make(cl):
        if len(cl) == 1:
            return cl[0]
        node = alloc()
        comps = _components(cl, adj_w)
        parts = comps if len(comps) > 1 else _spectral_split(cl, adj_w)
        kids = []
        for p in parts:
            c = make(p)
            parent[c] = node
            weight[c] = boundary(p)
            kids.append(c)
        children[node] = kids
        return node

    if not verts:
        r = alloc()
        return RaeckeTree(r, {}, {}, {}, frozenset())
    root = make(verts)
    t = RaeckeTree(root, parent, weight, children, frozenset(verts))
    t._fill_clusters()
    return t


def binarize_tree(tree: RaeckeTree, alloc) -> RaeckeTree:
    """Replace every star with more than two children by a balanced binary
    tree.  Edges above the original children keep their weights; a new
    internal edge whose lower side holds children S gets
    min(w(S), w(all children) - w(S))."""
    parent = dict(tree.parent)
    weight = dict(tree.weight)
    children = {k: list(v) for k, v in tree.children.items()}
    for u in list(children):
        kids = children[u]
        if len(kids) <= 2:
            continue
        total = sum(tree.weight[c] for c in kids)

        def group(ks):
            # returns (subtree root, weight of the original children below)
            if len(ks) == 1:
                return ks[0], tree.weight[ks[0]]
            mid = (len(ks) + 1) // 2
            x = alloc()
            s = 0.0
            children[x] = []
            for part in (ks[:mid], ks[mid:]):
                y, sy = group(part)
                parent[y] = x
                children[x].append(y)
                if len(part) > 1:
                    weight[y] = min(sy, total - sy)
                s += sy
            return x, s

        mid = (len(kids) + 1) // 2
        tops = []
        for part in (kids[:mid], kids[mid:]):
            y, sy = group(part)
            parent[y] = u
            if len(part) > 1:
                weight[y] = min(sy, total - sy)
            tops.append(y)
        children[u] = tops
    out = RaeckeTree(tree.root, parent, weight, children, tree.leaves)
    out._fill_clusters()
    return out


def _dijkstra_path(adj, s, t):
    dist = {s: 0.0}
    prev = {}
    pq = [(0.0, s)]
    while pq:
        d, x = heapq.heappop(pq)
        if x == t:
            break
        if d > dist[x]:
            continue
        for y, (length, key) in adj[x].items():
            nd = d + length
            if nd < dist.get(y, math.inf):
                dist[y] = nd
                prev[y] = x
                heapq.heappush(pq, (nd, y))
    if t not in dist:
        return None
    path = [t]
    while path[-1] != s:
        path.append(prev[path[-1]])
    return path[::-1]


def certify_tree(tree: RaeckeTree, view):
    """Two-way embedding certificate.

    q_up: congestion of routing every tree edge's weight in G between
    cluster representatives along shortest paths (lengths 1/c).
    q_low: max load/weight when every G edge follows its tree path.
    Afterwards every terminal max-flow of the tree scaled by 1/q_up lies in
    [maxflow_G / (q_up q_low), maxflow_G].
    """
    agg = view.aggregated()
    adj = {}
    for (a, b), c in agg.items():
        adj.setdefault(a, {})[b] = (1.0 / c, (a, b))
        adj.setdefault(b, {})[a] = (1.0 / c, (a, b))
    deg = {}
    for (a, b), c in agg.items():
        deg[a] = deg.get(a, 0.0) + c
        deg[b] = deg.get(b, 0.0) + c
    rep = {x: max(cl, key=lambda v: (deg.get(v, 0.0), -v)) for x, cl in tree.cluster.items()}
    load = {}
    for x, p in tree.parent.items():
        w = tree.weight[x]
        if w <= 0 or rep[x] == rep[p]:
            continue
        path = _dijkstra_path(adj, rep[x], rep[p])
        if path is None:
            raise RuntimeError("tree edge with positive weight across components")
        for a, b in zip(path, path[1:]):
            k = (a, b) if a < b else (b, a)
            load[k] = load.get(k, 0.0) + w
    q_up = max([load[k] / agg[k] for k in load] + [1.0])
    tload = {}
    for (a, b), c in agg.items():
        for x in tree.path(a, b):
            tload[x] = tload.get(x, 0.0) + c
    q_low = 1.0
    for x, l in tload.items():
        w = tree.weight[x]
        q_low = max(q_low, math.inf if w <= 0 else l / w)
    return q_up, q_low


def build_raecke_tree(view, alloc=None, keep=()) -> RaeckeTree:
    """Bounded-degree hierarchical tree with certified quality, weights
    already scaled down by q_up."""
    if alloc is None:
        alloc = IdAllocator(view.n)
    raw = build_raw_tree(view, alloc, keep)
    t = binarize_tree(raw, alloc)
    if not t.parent:
        return t
    q_up, q_low = certify_tree(t, view)
    t.weight = {x: w / q_up for x, w in t.weight.items()}
    t.q_up, t.q_low, t.quality = q_up, q_low, q_up * q_low
    return t


def flow_vertex_sparsify(tree: RaeckeTree, T) -> GraphView:
    """Union of the leaf-to-root paths of the terminals."""
    edges = {}
    for v in sorted(T):
        if v not in tree.leaves:
            raise TerminalNotLeaf(v)
        x = v
        while x != tree.root:
            p = tree.parent[x]
            if tree.weight[x] > 0:
                edges[x] = (x, p, tree.weight[x])
            x = p
    n = max(tree.nodes()) + 1 if tree.parent else (max(T) + 1 if T else 0)
    return GraphView.from_triples(n, [edges[k] for k in sorted(edges)])
