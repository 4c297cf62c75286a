"""Command line entry point.

    dynsparse run --mode mincut --trace t.trace [--oracle-check] [--out DIR]
    dynsparse gen --kind random-gnm --n 40 --m 120 --ops 300 > t.trace
    dynsparse sweep --mode mincut --sizes 2000 8000 32000

``dynsparse --mode ...`` is shorthand for ``dynsparse run --mode ...``.
Exit codes: 0 ok, 2 parse or configuration error, 3 invariant violation.
"""
from __future__ import annotations

import argparse
import configparser
import sys
from pathlib import Path

from . import traces

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT = 0, 2, 3


def _parser():
    p = argparse.ArgumentParser(prog="dynsparse", description="dynamic vertex sparsifiers: trace replay")
    sub = p.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("run", help="replay a trace")
    r.add_argument("--config", default=None, help="key = value file; flags given explicitly win")
    r.add_argument("--mode", default=None, choices=sorted(traces.MODES))
    r.add_argument("--trace", default=None, help="trace file ('-' for stdin)")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--levels", type=int, default=1, help="hierarchy / decomposition-tree levels")
    r.add_argument("--r", type=int, default=2, help="Thorup-Zwick parameter")
    r.add_argument("--j", type=int, default=None, help="j-tree size / rebuild period")
    r.add_argument("--k", type=int, default=None, help="decomposition size")
    r.add_argument("--epsilon", type=float, default=0.25)
    r.add_argument("--depth", type=int, default=1, help="Schur chain depth d")
    r.add_argument("--beta", type=float, default=None,
                   help="er: terminal fraction; offline: integer branching base")
    r.add_argument("--plugin", default="identity", choices=["identity", "distance", "flow"])
    r.add_argument("--oracle-check", action="store_true")
    r.add_argument("--emit-cut", action="store_true")
    r.add_argument("--out", default=None, help="directory for answers.txt, report.csv, summary.txt")

    g = sub.add_parser("gen", help="write a synthetic trace")
    g.add_argument("--kind", required=True, choices=traces.KINDS)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, default=None)
    g.add_argument("--ops", type=int, default=0)
    g.add_argument("--query-rate", type=float, default=0.1)
    g.add_argument("--delete-rate", type=float, default=0.5)
    g.add_argument("--interp", default="length", choices=traces.INTERPRETATIONS)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None)

    s = sub.add_parser("sweep", help="time updates and queries over growing sizes")
    s.add_argument("--mode", required=True, choices=["mincut", "mincut-adaptive", "apsp", "er"])
    s.add_argument("--sizes", type=int, nargs="+", required=True)
    s.add_argument("--reps", type=int, default=1)
    s.add_argument("--ops", type=int, default=200)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=None)
    return p


_CONFIG_KEYS = {
    "mode": str, "trace": str, "seed": int, "levels": int, "r": int, "j": int, "k": int,
    "epsilon": float, "depth": int, "beta": float, "plugin": str, "out": str,
    "oracle_check": "bool", "emit_cut": "bool",
}


def read_config(path):
    """Read a flat ``key = value`` file (an optional [run] header is allowed)."""
    text = Path(path).read_text()
    cp = configparser.ConfigParser()
    if not text.lstrip().startswith("["):
        text = "[run]\n" + text
    try:
        cp.read_string(text)
    except configparser.Error as err:
        raise ValueError(f"bad config {path}: {err}") from None
    out = {}
    for key, raw in cp.items(cp.sections()[0] if cp.sections() else "run"):
        key = key.replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise ValueError(f"unknown config key {key!r}")
        kind = _CONFIG_KEYS[key]
        if kind == "bool":
            out[key] = cp.BOOLEAN_STATES.get(raw.lower())
            if out[key] is None:
                raise ValueError(f"config key {key!r}: not a boolean: {raw!r}")
        else:
            try:
                out[key] = kind(raw)
            except ValueError:
                raise ValueError(f"config key {key!r}: bad value {raw!r}") from None
    return out


def _merge_config(a, argv):
    given = {tok.split("=")[0][2:].replace("-", "_") for tok in argv if tok.startswith("--")}
    for key, val in read_config(a.config).items():
        if key not in given:
            setattr(a, key, val)
    if a.mode not in traces.MODES:
        raise ValueError(f"unknown mode {a.mode!r}")


def _run(a):
    if a.mode is None or a.trace is None:
        raise ValueError("--mode and --trace are required (on the command line or in --config)")
    text = sys.stdin.read() if a.trace == "-" else Path(a.trace).read_text()
    cfg = traces.RunConfig(
        mode=a.mode, seed=a.seed, levels=a.levels, r=a.r, j=a.j, k=a.k, epsilon=a.epsilon,
        depth=a.depth, beta=a.beta, plugin=a.plugin, oracle_check=a.oracle_check, emit_cut=a.emit_cut,
    )
    rep = traces.run_trace(cfg, text)
    answers = "\n".join(rep.answer_lines())
    if answers:
        print(answers)
    if a.out:
        out = Path(a.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "answers.txt").write_text(answers + ("\n" if answers else ""))
        (out / "report.csv").write_text(rep.to_csv())
        (out / "summary.txt").write_text(rep.summary())
    print(rep.summary(), end="", file=sys.stderr)


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0].startswith("--") and argv[0] not in ("--help",):
        argv.insert(0, "run")
    a = _parser().parse_args(argv)
    try:
        if a.cmd == "run":
            if a.config:
                _merge_config(a, argv)
            _run(a)
        elif a.cmd == "gen":
            text = traces.gen_trace(a.kind, a.n, a.m, a.ops, a.query_rate, a.seed, interp=a.interp,
                                    delete_rate=a.delete_rate, path=a.out)
            if a.out is None:
                print(text, end="")
        else:
            csv_text = traces.scaling_sweep(a.mode, a.sizes, a.reps, a.ops, seed=a.seed)
            if a.out:
                Path(a.out).write_text(csv_text)
            print(csv_text, end="")
    except traces.InvariantViolation as err:
        print(f"invariant violation: {err}", file=sys.stderr)
        return EXIT_INVARIANT
    except (traces.ParseError, traces.ModeMismatch, traces.InfeasibleParameters, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
