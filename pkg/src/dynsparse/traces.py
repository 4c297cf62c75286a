"""Trace files: parsing, synthetic generation and replay against the
dynamic structures, with optional oracle checking.

Format (one event per line, ``#`` comments and blank lines ignored)::

    n <N> mode <capacity|length|conductance>
    I <u> <v> <w>
    D <edge-id>
    DUV <u> <v>
    Q <s> <t>

Edge ids count insertions from 0 in trace order.
"""
from __future__ import annotations

import csv
import io
import math
import random
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import oracles
from .framework import INCREMENTAL, Hierarchy, HierarchyConfig, PropertyPlugin, choose_level_sizes
from .graph import DynamicGraph, UnknownEdge
from .jtree import ADAPTIVE, OBLIVIOUS, CutDecomposition
from .metric import DynamicAPSP
from .offline import DistancePlugin, FlowPlugin, IdentityPlugin, offline_answers
from .schur import SchurChain
from .tz import TzIvs

INTERPRETATIONS = ("capacity", "length", "conductance")


class ParseError(ValueError):
    def __init__(self, msg, line=None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


class ModeMismatch(ValueError):
    pass


class InfeasibleParameters(ValueError):
    pass


class InvariantViolation(RuntimeError):
    pass


@dataclass
class Trace:
    n: int
    interp: str
    ops: list  # tuples ("I", u, v, w) | ("D", id) | ("DUV", u, v) | ("Q", s, t)
    lines: list = field(default_factory=list)  # source line per op


def _int(tok, lineno, what):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"bad {what} {tok!r}", lineno) from None


def parse(text) -> Trace:
    """Parse trace text (or a Path) into a Trace."""
    if isinstance(text, Path):
        text = text.read_text()
    n = interp = None
    ops, lines = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if n is None:
            if len(tok) != 4 or tok[0] != "n" or tok[2] != "mode":
                raise ParseError("expected header 'n <N> mode <interpretation>'", lineno)
            n = _int(tok[1], lineno, "vertex count")
            if n < 1:
                raise ParseError("vertex count must be positive", lineno)
            interp = tok[3]
            if interp not in INTERPRETATIONS:
                raise ParseError(f"unknown mode {interp!r}", lineno)
            continue
        kind = tok[0]
        arity = {"I": 4, "D": 2, "DUV": 3, "Q": 3}.get(kind)
        if arity is None:
            raise ParseError(f"unknown event {kind!r}", lineno)
        if len(tok) != arity:
            raise ParseError(f"{kind} takes {arity - 1} arguments", lineno)
        if kind == "D":
            eid = _int(tok[1], lineno, "edge id")
            ops.append(("D", eid))
        else:
            a = _int(tok[1], lineno, "vertex")
            b = _int(tok[2], lineno, "vertex")
            for x in (a, b):
                if not 0 <= x < n:
                    raise ParseError(f"vertex {x} out of range", lineno)
            if kind == "I":
                try:
                    w = float(tok[3])
                except ValueError:
                    raise ParseError(f"bad weight {tok[3]!r}", lineno) from None
                if not (w > 0 and math.isfinite(w)):
                    raise ParseError("weights must be positive and finite", lineno)
                if a == b:
                    raise ParseError("self-loops are not allowed", lineno)
                ops.append(("I", a, b, w))
            else:
                ops.append((kind, a, b))
        lines.append(lineno)
    if n is None:
        raise ParseError("empty trace: missing header")
    return Trace(n, interp, ops, lines)


def load(path) -> Trace:
    return parse(Path(path))


def format_trace(tr: Trace) -> str:
    out = [f"n {tr.n} mode {tr.interp}"]
    for op in tr.ops:
        if op[0] == "I":
            out.append(f"I {op[1]} {op[2]} {op[3]!r}")
        else:
            out.append(" ".join(str(x) for x in op))
    return "\n".join(out) + "\n"


# -- generation ------------------------------------------------------------------

KINDS = ("random-gnm", "path", "grid", "cycle-chords")


def _weight(rng, n):
    return round(math.exp(rng.uniform(0.0, math.log(max(n, 2) ** 2))), 6)


def gen_trace(kind, n, m=None, ops=0, query_rate=0.1, seed=0, interp="length", delete_rate=0.5, path=None) -> str:
    """Synthetic workload: an initial graph followed by ``ops`` random events.

    Weights are log-uniform in [1, n^2].  Deletions only ever name live
    edges; delete_rate=0 gives insert-only traces.
    """
    if kind not in KINDS:
        raise InfeasibleParameters(f"unknown kind {kind!r}")
    if n < 2:
        raise InfeasibleParameters("need n >= 2")
    if not 0 <= query_rate <= 1 or not 0 <= delete_rate <= 1:
        raise InfeasibleParameters("rates must lie in [0, 1]")
    rng = random.Random(f"trace:{kind}:{n}:{m}:{ops}:{query_rate}:{seed}")
    pairs = []
    if kind == "random-gnm":
        if m is None or m > n * (n - 1) // 2 or m < 0:
            raise InfeasibleParameters(f"G(n={n}, m={m}) impossible")
        seen = set()
        while len(pairs) < m:
            u, v = rng.sample(range(n), 2)
            key = (min(u, v), max(u, v))
            if key not in seen:
                seen.add(key)
                pairs.append(key)
    elif kind == "path":
        if m not in (None, n - 1):
            raise InfeasibleParameters("a path on n vertices has n-1 edges")
        pairs = [(i, i + 1) for i in range(n - 1)]
    elif kind == "grid":
        side = int(round(math.sqrt(n)))
        if side * side != n:
            raise InfeasibleParameters("grid needs a square vertex count")
        for r in range(side):
            for c in range(side):
                x = r * side + c
                if c + 1 < side:
                    pairs.append((x, x + 1))
                if r + 1 < side:
                    pairs.append((x, x + side))
        if m not in (None, len(pairs)):
            raise InfeasibleParameters(f"a {side}x{side} grid has {len(pairs)} edges")
    else:
        if n < 3:
            raise InfeasibleParameters("a cycle needs n >= 3")
        m = n if m is None else m
        if m < n or m > n * (n - 1) // 2:
            raise InfeasibleParameters("cycle-chords needs n <= m <= n(n-1)/2")
        pairs = [(i, (i + 1) % n) for i in range(n)]
        seen = {(min(a, b), max(a, b)) for a, b in pairs}
        while len(pairs) < m:
            u, v = rng.sample(range(n), 2)
            key = (min(u, v), max(u, v))
            if key not in seen:
                seen.add(key)
                pairs.append(key)
    lines = [f"n {n} mode {interp}"]
    live = []
    nid = 0
    for u, v in pairs:
        lines.append(f"I {u} {v} {_weight(rng, n)!r}")
        live.append(nid)
        nid += 1
    for _ in range(ops):
        r = rng.random()
        if r < query_rate:
            s, t = rng.sample(range(n), 2)
            lines.append(f"Q {s} {t}")
        elif live and rng.random() < delete_rate:
            eid = live.pop(rng.randrange(len(live)))
            lines.append(f"D {eid}")
        else:
            u, v = rng.sample(range(n), 2)
            lines.append(f"I {u} {v} {_weight(rng, n)!r}")
            live.append(nid)
            nid += 1
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


# -- running ----------------------------------------------------------------------------

MODES = {
    # mode: (graph interpretation, deletions allowed, answer direction)
    "incremental": ("length", False, "min"),
    "offline": (None, True, None),
    "mincut": ("capacity", True, "min"),
    "mincut-adaptive": ("capacity", True, "min"),
    "apsp": ("length", True, "min"),
    "er": ("conductance", True, None),
}


@dataclass
class RunConfig:
    mode: str
    seed: int = 0
    levels: int = 1
    r: int = 2
    j: int = None
    k: int = None
    epsilon: float = 0.25
    depth: int = 1
    beta: float = None
    plugin: str = "identity"
    oracle_check: bool = False
    emit_cut: bool = False

    def validate(self, tr: Trace):
        if self.mode not in MODES:
            raise ModeMismatch(f"unknown mode {self.mode!r}")
        want, dels, _ = MODES[self.mode]
        if self.mode == "offline":
            if self.plugin not in ("identity", "distance", "flow"):
                raise ModeMismatch(f"unknown plugin {self.plugin!r}")
            want = {"identity": None, "distance": "length", "flow": "capacity"}[self.plugin]
            if want is None and tr.interp == "conductance":
                raise ModeMismatch("offline mode has no resistance plugin")
        if want is not None and tr.interp != want:
            raise ModeMismatch(f"mode {self.mode} needs a '{want}' trace, got '{tr.interp}'")
        if not dels:
            for op, ln in zip(tr.ops, tr.lines):
                if op[0] in ("D", "DUV"):
                    raise ModeMismatch(f"line {ln}: {self.mode} mode does not accept deletions")
        if self.levels < 1 or self.r < 1 or self.depth < 0:
            raise ModeMismatch("levels, r must be >= 1 and depth >= 0")
        if self.emit_cut and not self.mode.startswith("mincut"):
            raise ModeMismatch("--emit-cut needs a min-cut mode")

    def direction(self):
        if self.mode == "offline":
            return {"identity": "exact", "distance": "min", "flow": "max"}[self.plugin]
        return MODES[self.mode][2]


@dataclass
class QueryRecord:
    idx: int
    s: int
    t: int
    estimate: float
    oracle: float = None
    cut: tuple = None

    @property
    def ratio(self):
        if self.oracle is None:
            return None
        if self.oracle == 0 or math.isinf(self.oracle):
            return 1.0 if self.estimate == self.oracle else math.inf
        return self.estimate / self.oracle


@dataclass
class RunReport:
    mode: str
    queries: list = field(default_factory=list)
    update_s: list = field(default_factory=list)
    query_s: list = field(default_factory=list)
    build_s: float = 0.0
    violations: int = 0
    certificates: dict = field(default_factory=dict)
    recourse: dict = field(default_factory=dict)

    def answer_lines(self) -> list:
        out = []
        for q in self.queries:
            out.append(f"A {q.idx} {_fmt(q.estimate)}")
            if q.cut is not None:
                out.append("CUT %d %s" % (q.idx, " ".join(str(v) for v in q.cut)))
        return out

    def ratios(self):
        return [q.ratio for q in self.queries if q.ratio is not None]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["idx", "s", "t", "estimate", "oracle", "ratio"])
        for q in self.queries:
            w.writerow([q.idx, q.s, q.t, _fmt(q.estimate), "" if q.oracle is None else _fmt(q.oracle),
                        "" if q.ratio is None else _fmt(q.ratio)])
        return buf.getvalue()

    def summary(self) -> str:
        rs = self.ratios()
        lines = [f"mode {self.mode}", f"queries {len(self.queries)}"]
        if rs:
            finite = [r for r in rs if math.isfinite(r)]
            lines.append(f"max_ratio {_fmt(max(rs))}")
            lines.append(f"min_ratio {_fmt(min(rs))}")
            if finite:
                lines.append(f"p95_ratio {_fmt(float(np.percentile(finite, 95)))}")
            lines.append(f"violations {self.violations}")
        lines.append(f"build_s {self.build_s:.6f}")
        if self.update_s:
            lines.append(f"mean_update_us {1e6 * sum(self.update_s) / len(self.update_s):.3f}")
        if self.query_s:
            lines.append(f"mean_query_us {1e6 * sum(self.query_s) / len(self.query_s):.3f}")
        for k in sorted(self.certificates):
            lines.append(f"{k} {_fmt(self.certificates[k])}")
        for k in sorted(self.recourse):
            lines.append(f"recourse_{k} {self.recourse[k]}")
        return "\n".join(lines) + "\n"


def _fmt(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, (list, tuple)):
        return " ".join(_fmt(v) for v in x)
    return format(float(x), ".10g")


def _oracle(interp, view, s, t):
    if s == t:
        return 0.0
    if interp == "length":
        return oracles.exact_distance(view, s, t)
    if interp == "capacity":
        return oracles.exact_min_cut(view, s, t).value
    try:
        return oracles.exact_effective_resistance(view, s, t)
    except oracles.DifferentComponents:
        return math.inf


def _leading_inserts(ops):
    k = 0
    while k < len(ops) and ops[k][0] == "I":
        k += 1
    return k


class _Runner:
    """Adapter: bulk-load the leading inserts, then one method per event."""

    def __init__(self, cfg: RunConfig, tr: Trace, g: DynamicGraph):
        self.cfg = cfg
        self.g = g
        mode = cfg.mode
        if mode == "incremental":
            m = max(sum(1 for op in tr.ops if op[0] == "I"), 1)
            sizes = choose_level_sizes(m, cfg.levels, INCREMENTAL)
            plugin = PropertyPlugin("distance", oracles.exact_distance, "min", math.inf)
            self.s = Hierarchy(g, HierarchyConfig(cfg.levels, sizes, INCREMENTAL), lambda i: TzIvs(cfg.r), plugin)
        elif mode in ("mincut", "mincut-adaptive"):
            self.s = CutDecomposition(g, j=cfg.j, mode=OBLIVIOUS if mode == "mincut" else ADAPTIVE,
                                      seed=cfg.seed, k=cfg.k)
        elif mode == "apsp":
            self.s = DynamicAPSP(g, j=cfg.j, seed=cfg.seed, k=cfg.k)
        elif mode == "er":
            self.s = SchurChain(g, depth=cfg.depth, eps=cfg.epsilon, beta=cfg.beta, seed=cfg.seed)
        else:
            raise ModeMismatch(mode)

    def insert(self, u, v, w):
        return self.s.insert(u, v, w)

    def delete(self, eid):
        return self.s.delete(eid)

    def query(self, s, t):
        if self.cfg.mode.startswith("mincut"):
            if s == t:
                return math.inf, None
            if self.cfg.emit_cut:
                val, cut = self.s.query(s, t, want_cut=True)
                return val, tuple(sorted(cut))
            return self.s.query(s, t), None
        try:
            return self.s.query(s, t), None
        except oracles.DifferentComponents:
            return math.inf, None

    def certificates(self) -> dict:
        s = self.s
        out = {}
        if isinstance(s, CutDecomposition):
            out["rho_emp"] = s.rho_emp
            out["c0"] = s.c0()
            out["builds"] = s.builds
        elif isinstance(s, DynamicAPSP):
            out["rho_emp"] = s.rho_emp
            out["builds"] = s.builds
        elif isinstance(s, SchurChain):
            out["beta"] = s.beta
            out["rebuilds"] = len(s.rebuilds())
        elif isinstance(s, Hierarchy):
            out["rebuilds"] = sum(s.stats()["rebuilds"])
        return out


def run_trace(cfg: RunConfig, trace) -> RunReport:
    """Replay a trace (Trace, text or Path) and collect a report."""
    tr = trace if isinstance(trace, Trace) else parse(trace)
    cfg.validate(tr)
    rep = RunReport(cfg.mode)
    direction = cfg.direction()
    interp = tr.interp
    if cfg.mode == "offline":
        return _run_offline(cfg, tr, rep, direction)
    g = DynamicGraph(tr.n, max_ratio=None)
    mirror = DynamicGraph(tr.n, max_ratio=None) if cfg.oracle_check else None
    lead = _leading_inserts(tr.ops)
    ids = {}
    nid = 0
    for op in tr.ops[:lead]:
        rec = g.insert_edge(op[1], op[2], op[3])
        ids[nid] = rec.id
        nid += 1
        if mirror is not None:
            mirror.insert_edge(op[1], op[2], op[3])
    t0 = time.perf_counter()
    run = _Runner(cfg, tr, g)
    rep.build_s = time.perf_counter() - t0
    qidx = 0
    for op, ln in zip(tr.ops[lead:], tr.lines[lead:]):
        kind = op[0]
        if kind == "I":
            t0 = time.perf_counter()
            rec = run.insert(op[1], op[2], op[3])
            rep.update_s.append(time.perf_counter() - t0)
            ids[nid] = rec.id
            nid += 1
            if mirror is not None:
                mirror.insert_edge(op[1], op[2], op[3])
        elif kind in ("D", "DUV"):
            if kind == "D":
                if op[1] not in ids or ids[op[1]] not in g.edges:
                    raise ParseError(f"edge {op[1]} is not live", ln)
                eid = ids[op[1]]
            else:
                rec = g.find_edge(op[1], op[2])
                if rec is None:
                    raise ParseError(f"no live edge between {op[1]} and {op[2]}", ln)
                eid = rec.id
            t0 = time.perf_counter()
            run.delete(eid)
            rep.update_s.append(time.perf_counter() - t0)
            if mirror is not None:
                mirror.delete_edge(eid)
        else:
            s, t = op[1], op[2]
            t0 = time.perf_counter()
            est, cut = run.query(s, t)
            rep.query_s.append(time.perf_counter() - t0)
            q = QueryRecord(qidx, s, t, float(est), cut=cut)
            if mirror is not None:
                q.oracle = _oracle(interp, mirror.snapshot(), s, t)
                _check(q, direction, rep, ln)
            rep.queries.append(q)
            qidx += 1
    rep.certificates = run.certificates()
    return rep


def _check(q, direction, rep, ln):
    tol = 1e-9
    bad = False
    if direction == "min":
        bad = q.estimate < q.oracle * (1 - tol)
    elif direction == "max":
        bad = q.estimate > q.oracle * (1 + tol)
    elif direction == "exact":
        bad = not math.isclose(q.estimate, q.oracle, rel_tol=tol, abs_tol=0.0)
    if bad:
        rep.violations += 1
        raise InvariantViolation(f"line {ln}: query {q.idx} estimate {q.estimate!r} vs oracle {q.oracle!r}")


def _run_offline(cfg, tr, rep, direction):
    ops = list(tr.ops)
    if cfg.plugin == "identity":
        solver = {"length": oracles.exact_distance, "capacity": oracles.min_cut_value}[tr.interp]
        plugin = IdentityPlugin(solver)
    elif cfg.plugin == "distance":
        plugin = DistancePlugin(cfg.r)
    else:
        plugin = FlowPlugin()
    betas = None
    if cfg.beta is not None:
        b = int(cfg.beta)
        if b < 2:
            raise ModeMismatch("offline --beta is the integer branching base (>= 2)")
        betas = [b ** (cfg.levels + 1 - i) for i in range(cfg.levels + 1)]
    t0 = time.perf_counter()
    try:
        answers, tree = offline_answers(tr.n, ops, plugin, levels=cfg.levels, betas=betas)
    except UnknownEdge as err:
        raise ParseError(f"deletion of a dead edge: {err}") from None
    rep.build_s = time.perf_counter() - t0
    mirror = None
    if cfg.oracle_check:
        mirror = DynamicGraph(tr.n, max_ratio=None)
    pos = 0
    qidx = 0
    for i, op in enumerate(tr.ops):
        if mirror is not None:
            if op[0] == "I":
                mirror.insert_edge(op[1], op[2], op[3])
            elif op[0] == "D":
                mirror.delete_edge(op[1])
            elif op[0] == "DUV":
                mirror.delete_uv(op[1], op[2])
        if op[0] != "Q":
            continue
        q = QueryRecord(qidx, op[1], op[2], float(answers[pos]))
        pos += 1
        if mirror is not None:
            q.oracle = _oracle(tr.interp, mirror.snapshot(), op[1], op[2])
            _check(q, direction, rep, tr.lines[i])
        rep.queries.append(q)
        qidx += 1
    quality = max((node.quality for node in tree.nodes()), default=1.0)
    rep.certificates = {"quality": quality, "levels": cfg.levels}
    return rep


# -- scaling -----------------------------------------------------------------------------

def _structure_for(mode, g, seed):
    if mode == "mincut":
        return CutDecomposition(g, mode=OBLIVIOUS, seed=seed)
    if mode == "mincut-adaptive":
        return CutDecomposition(g, mode=ADAPTIVE, seed=seed)
    if mode == "apsp":
        return DynamicAPSP(g, seed=seed)
    if mode == "er":
        return SchurChain(g, depth=1, seed=seed)
    raise ValueError(f"scaling sweep does not support mode {mode!r}")


def scaling_sweep(mode, sizes, reps=1, ops=200, query_rate=0.1, seed=0, avg_degree=8) -> str:
    """CSV of amortized update/query time per size (edge count m).

    slope is the least-squares log-log slope of mean update time against
    size over all rows so far; empty for a single size.
    """
    sizes = list(sizes)
    if sizes != sorted(sizes):
        raise ValueError("sizes must be ascending")
    rows = []
    for m in sizes:
        n = max(4, (2 * m) // avg_degree)
        upd, qry = [], []
        for rep in range(reps):
            rng = random.Random(f"sweep:{mode}:{m}:{seed}:{rep}")
            g = DynamicGraph(n, max_ratio=None)
            for i in range(n - 1):  # a random spanning tree keeps G connected
                g.insert_edge(i + 1, rng.randrange(i + 1), _weight(rng, n))
            while g.m < m:
                u, v = rng.sample(range(n), 2)
                g.insert_edge(u, v, _weight(rng, n))
            st = _structure_for(mode, g, seed + rep)
            for _ in range(ops):
                if rng.random() < query_rate:
                    s, t = rng.sample(range(n), 2)
                    t0 = time.perf_counter()
                    st.query(s, t)
                    qry.append(time.perf_counter() - t0)
                elif rng.random() < 0.5 and g.m > n:
                    eid = rng.choice(sorted(g.edges))
                    t0 = time.perf_counter()
                    st.delete(eid)
                    upd.append(time.perf_counter() - t0)
                else:
                    u, v = rng.sample(range(n), 2)
                    w = _weight(rng, n)
                    t0 = time.perf_counter()
                    st.insert(u, v, w)
                    upd.append(time.perf_counter() - t0)
        rows.append((m, 1e6 * float(np.mean(upd)) if upd else 0.0, 1e6 * float(np.mean(qry)) if qry else 0.0))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["size", "mode", "mean_update_us", "mean_query_us", "slope"])
    for i, (m, u, q) in enumerate(rows):
        slope = ""
        if i >= 1:
            xs = np.log([r[0] for r in rows[: i + 1]])
            ys = np.log([max(r[1], 1e-12) for r in rows[: i + 1]])
            slope = format(float(np.polyfit(xs, ys, 1)[0]), ".4f")
        w.writerow([m, mode, format(u, ".3f"), format(q, ".3f"), slope])
    return buf.getvalue()


def parse_sweep(text) -> list:
    return list(csv.DictReader(io.StringIO(text)))
