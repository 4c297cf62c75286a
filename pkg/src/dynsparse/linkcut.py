"""Link-cut trees (splay based) with path min/max over edge weights.

Edges are represented by their own nodes so that re-rooting (evert) keeps
the weights attached to the right edges.  Vertex nodes carry no value.
"""
from __future__ import annotations



class _Node:
    __slots__ = ("key", "left", "right", "parent", "rev", "val", "mn", "mx")

    def __init__(self, key, val=None):
        self.key = key
        self.left = self.right = self.parent = None
        self.rev = False
        self.val = val
        self.mn = self.mx = None
        self._pull()

    def _pull(self):
        best_min = best_max = None
        if self.val is not None:
            best_min = best_max = (self.val, self.key)
        for c in (self.left, self.right):
            if c is None:
                continue
            if c.mn is not None and (best_min is None or c.mn < best_min):
                best_min = c.mn
            if c.mx is not None and (best_max is None or c.mx[0] > best_max[0] or (c.mx[0] == best_max[0] and c.mx[1] < best_max[1])):
                best_max = c.mx
        self.mn, self.mx = best_min, best_max

    def is_root(self):
        p = self.parent
        return p is None or (p.left is not self and p.right is not self)

    def push(self):
        if self.rev:
            self.left, self.right = self.right, self.left
            for c in (self.left, self.right):
                if c is not None:
                    c.rev = not c.rev
            self.rev = False


def _rotate(x):
    p = x.parent
    g = p.parent
    if not p.is_root():
        if g.left is p:
            g.left = x
        else:
            g.right = x
    x.parent = g
    if p.left is x:
        p.left = x.right
        if x.right is not None:
            x.right.parent = p
        x.right = p
    else:
        p.right = x.left
        if x.left is not None:
            x.left.parent = p
        x.left = p
    p.parent = x
    p._pull()
    x._pull()


def _splay(x):
    stack = [x]
    y = x
    while not y.is_root():
        y = y.parent
        stack.append(y)
    for y in reversed(stack):
        y.push()
    while not x.is_root():
        p = x.parent
        if not p.is_root():
            g = p.parent
            if (g.left is p) == (p.left is x):
                _rotate(p)
            else:
                _rotate(x)
        _rotate(x)


def _access(x):
    last = None
    y = x
    while y is not None:
        _splay(y)
        y.right = last
        y._pull()
        last = y
        y = y.parent
    _splay(x)
    return last


class LinkCutTree:
    def __init__(self):
        self.nodes: dict = {}

    def add(self, key, val=None):
        if key in self.nodes:
            raise KeyError(f"node {key!r} exists")
        self.nodes[key] = _Node(key, val)

    def __contains__(self, key):
        return key in self.nodes

    def evert(self, key):
        x = self.nodes[key]
        _access(x)
        x.rev = not x.rev
        x.push()

    def find_root(self, key):
        x = self.nodes[key]
        _access(x)
        while True:
            x.push()
            if x.left is None:
                break
            x = x.left
        _splay(x)
        return x.key

    def connected(self, a, b):
        return self.find_root(a) == self.find_root(b)

    def link(self, a, b):
        """Make a a child of b (a becomes the root of its tree first)."""
        if self.connected(a, b):
            raise ValueError("link would create a cycle")
        self.evert(a)
        self.nodes[a].parent = self.nodes[b]

    def cut(self, a, b):
        self.evert(a)
        y = self.nodes[b]
        _access(y)
        x = self.nodes[a]
        if y.left is not x or x.right is not None:
            raise ValueError(f"{a!r} and {b!r} are not adjacent")
        y.left = None
        x.parent = None
        y._pull()

    def path_aggregate(self, a, b):
        """(min, max) over valued nodes on the a-b path; each is (value, key)."""
        if not self.connected(a, b):
            raise ValueError("not connected")
        self.evert(a)
        y = self.nodes[b]
        _access(y)
        return y.mn, y.mx

    def set_value(self, key, val):
        x = self.nodes[key]
        _access(x)
        x.val = val
        x._pull()


class LinkCutForest:
    """Weighted forest over vertices with edges keyed by id."""

    def __init__(self, n=0):
        self.t = LinkCutTree()
        self.ends: dict = {}
        for v in range(n):
            self.t.add(("v", v))

    def add_vertex(self, v):
        if ("v", v) not in self.t:
            self.t.add(("v", v))

    def link(self, u, v, eid, w):
        self.add_vertex(u)
        self.add_vertex(v)
        self.t.add(("e", eid), w)
        self.t.link(("e", eid), ("v", v))
        self.t.link(("v", u), ("e", eid))
        self.ends[eid] = (u, v)

    def cut(self, eid):
        u, v = self.ends.pop(eid)
        self.t.cut(("v", u), ("e", eid))
        self.t.cut(("e", eid), ("v", v))
        del self.t.nodes[("e", eid)]

    def set_weight(self, eid, w):
        self.t.set_value(("e", eid), w)

    def connected(self, u, v):
        return self.t.connected(("v", u), ("v", v))

    def path_min(self, u, v):
        """(weight, edge id) of a minimum edge on the u-v path, None if u == v."""
        mn, _ = self.t.path_aggregate(("v", u), ("v", v))
        return None if mn is None else (mn[0], mn[1][1])

    def path_max(self, u, v):
        _, mx = self.t.path_aggregate(("v", u), ("v", v))
        return None if mx is None else (mx[0], mx[1][1])
