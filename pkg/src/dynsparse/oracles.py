"""Exact reference computations: min cut, distances, effective resistance,
Schur complements.  These back the acceptance checks and double as the
static solvers that run on small sparsifiers."""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg

from .graph import GraphView, as_view

TOL = 1e-9


class DifferentComponents(ValueError):
    pass


class SingularBlock(ValueError):
    pass


@dataclass(frozen=True)
class CutResult:
    value: float
    side: frozenset


# -- max flow / min cut --------------------------------------------------

def dinic(n, arcs, s, t, exact=False):
    """Max flow on an undirected capacitated graph.

    arcs: iterable of (u, v, capacity).  Returns (value, side) where side is
    the set of vertices reachable from s in the final residual graph.
    With exact=True capacities are converted to Fractions so the returned
    value is the exact cut weight of the float inputs.
    """
    conv = Fraction if exact else float
    head = [[] for _ in range(n)]
    to, cap = [], []
    for u, v, c in arcs:
        if u == v:
            continue
        c = conv(c)
        head[u].append(len(to))
        to.append(v)
        cap.append(c)
        head[v].append(len(to))
        to.append(u)
        cap.append(c)
    zero = conv(0)
    flow = zero
    if s == t:
        raise ValueError("s == t")
    while True:
        level = [-1] * n
        level[s] = 0
        q = [s]
        for x in q:
            for a in head[x]:
                if cap[a] > 0 and level[to[a]] < 0:
                    level[to[a]] = level[x] + 1
                    q.append(to[a])
        if level[t] < 0:
            break
        it = [0] * n
        while True:
            path = []
            v = s
            while v != t:
                hv = head[v]
                while it[v] < len(hv):
                    a = hv[it[v]]
                    if cap[a] > 0 and level[to[a]] == level[v] + 1:
                        break
                    it[v] += 1
                if it[v] < len(hv):
                    a = hv[it[v]]
                    path.append(a)
                    v = to[a]
                    continue
                if v == s:
                    break
                level[v] = -1
                a = path.pop()
                v = to[a ^ 1]
                it[v] += 1
            if v != t:
                break
            f = min(cap[a] for a in path)
            for a in path:
                cap[a] -= f
                cap[a ^ 1] += f
            flow += f
    seen = [False] * n
    seen[s] = True
    stack = [s]
    while stack:
        x = stack.pop()
        for a in head[x]:
            if cap[a] > 0 and not seen[to[a]]:
                seen[to[a]] = True
                stack.append(to[a])
    side = frozenset(i for i in range(n) if seen[i])
    return flow, side


def exact_min_cut(view, s, t) -> CutResult:
    view = as_view(view)
    if s == t:
        raise ValueError("s and t must differ")
    val, side = dinic(view.n, ((e.u, e.v, e.w) for e in view.edges), s, t, exact=True)
    return CutResult(float(val), side)


def min_cut_value(view, s, t) -> float:
    """Float Dinic; used as the static solver on small sparsifiers."""
    view = as_view(view)
    val, _ = dinic(view.n, ((e.u, e.v, e.w) for e in view.edges), s, t)
    return float(val)


def cut_weight(view, side) -> float:
    side = set(side)
    total = Fraction(0)
    for e in as_view(view).edges:
        if (e.u in side) != (e.v in side):
            total += Fraction(e.w)
    return float(total)


# -- distances -------------------------------------------------------------

def dijkstra(view, s, targets=None):
    """Single-source distances as a list (inf where unreachable)."""
    view = as_view(view)
    adj = view.adjacency()
    dist = [math.inf] * view.n
    dist[s] = 0.0
    pq = [(0.0, s)]
    left = set(targets) if targets is not None else None
    while pq:
        d, x = heapq.heappop(pq)
        if d > dist[x]:
            continue
        if left is not None:
            left.discard(x)
            if not left:
                break
        for y, w, _ in adj[x]:
            nd = d + w
            if nd < dist[y]:
                dist[y] = nd
                heapq.heappush(pq, (nd, y))
    return dist


def exact_distance(view, s, t) -> float:
    if s == t:
        return 0.0
    return dijkstra(view, s, targets=(t,))[t]


# -- Laplacians, effective resistance, Schur complements -------------------

def laplacian(view, vertices=None) -> np.ndarray:
    """Dense Laplacian, rows ordered by ``vertices`` (default 0..n-1).
    Edges leaving the vertex list are ignored."""
    view = as_view(view)
    if vertices is None:
        vertices = range(view.n)
    idx = {v: i for i, v in enumerate(vertices)}
    L = np.zeros((len(idx), len(idx)))
    for e in view.edges:
        if e.u == e.v:
            continue
        a, b = idx.get(e.u), idx.get(e.v)
        if a is None or b is None:
            continue
        L[a, a] += e.w
        L[b, b] += e.w
        L[a, b] -= e.w
        L[b, a] -= e.w
    return L


def exact_effective_resistance(view, s, t) -> float:
    view = as_view(view)
    if s == t:
        return 0.0
    label = view.components()
    if label[s] != label[t]:
        raise DifferentComponents((s, t))
    comp = [v for v in range(view.n) if label[v] == label[s] and v != t]
    # grounded Laplacian: principal submatrix, so edges into t still count
    L = laplacian(view, comp + [t])[:-1, :-1]
    b = np.zeros(len(comp))
    b[comp.index(s)] = 1.0
    x = scipy.linalg.cho_solve(scipy.linalg.cho_factor(L), b)
    return float(x[comp.index(s)])


@dataclass
class DenseLaplacian:
    vertices: tuple
    matrix: np.ndarray

    def triples(self, rel_tol=1e-13):
        """Edges (a, b, conductance) of the graph this Laplacian encodes."""
        M = self.matrix
        scale = float(np.max(np.abs(M))) if M.size else 0.0
        out = []
        k = len(self.vertices)
        for i in range(k):
            for j in range(i + 1, k):
                w = -M[i, j]
                if w > rel_tol * scale:
                    out.append((self.vertices[i], self.vertices[j], float(w)))
        return out

    def to_view(self, n) -> GraphView:
        return GraphView.from_triples(n, self.triples())


def exact_schur_complement(view, C) -> DenseLaplacian:
    view = as_view(view)
    C = sorted(set(C))
    if not C:
        raise ValueError("C must be nonempty")
    cset = set(C)
    D = [v for v in range(view.n) if v not in cset]
    label = view.components()
    hit = {label[c] for c in C}
    bad = [v for v in D if label[v] not in hit]
    if bad:
        raise SingularBlock(f"components of {bad[:5]} miss C")
    L = laplacian(view, C + D)
    k = len(C)
    if not D:
        return DenseLaplacian(tuple(C), L)
    LCC, LCD, LDD = L[:k, :k], L[:k, k:], L[k:, k:]
    X = scipy.linalg.solve(LDD, LCD.T, assume_a="pos")
    S = LCC - LCD @ X
    S = 0.5 * (S + S.T)
    return DenseLaplacian(tuple(C), S)


def resistance_on_laplacian(L: np.ndarray, i: int, j: int) -> float:
    """ER between rows i and j of a connected dense Laplacian."""
    if i == j:
        return 0.0
    keep = [k for k in range(L.shape[0]) if k != j]
    Lr = L[np.ix_(keep, keep)]
    b = np.zeros(len(keep))
    b[keep.index(i)] = 1.0
    x = scipy.linalg.solve(Lr, b, assume_a="pos")
    return float(x[keep.index(i)])
