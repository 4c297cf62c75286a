# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Trace harness
#
# Traces are plain text: a header `n N mode <interp>` and one event per
# line.  `dynsparse run` replays them; `gen` and `sweep` create workloads
# and timing tables.

# %%
import subprocess
import sys
import tempfile
from pathlib import Path

from dynsparse.traces import gen_trace, parse_sweep, scaling_sweep

tmp = Path(tempfile.mkdtemp())
trace = tmp / "er.trace"
trace.write_text(gen_trace("random-gnm", 30, 70, 100, 0.2, seed=6, interp="conductance"))
r = subprocess.run([sys.executable, "-m", "dynsparse", "run", "--mode", "er", "--trace", str(trace),
                    "--oracle-check", "--out", str(tmp / "out")], capture_output=True, text=True)
print("exit", r.returncode)
print(r.stdout.splitlines()[:5])
print((tmp / "out" / "summary.txt").read_text())

# %%
for row in parse_sweep(scaling_sweep("apsp", [500, 1000, 2000], ops=50)):
    print(row)
