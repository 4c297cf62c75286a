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
# # Offline dynamic queries
#
# With the whole sequence known, edges live on intervals.  A decomposition
# tree over time lets each node hand a sparsified "permanent" part to its
# children; queries are answered at the leaves.

# %%
from dynsparse.traces import RunConfig, gen_trace, run_trace

for plugin, interp in (("identity", "length"), ("distance", "length"), ("flow", "capacity")):
    text = gen_trace("random-gnm", 30, 60, 600, 0.2, seed=2, interp=interp, delete_rate=0.5)
    rep = run_trace(RunConfig("offline", plugin=plugin, levels=1, oracle_check=True), text)
    rs = [r for r in rep.ratios() if r == r]
    print(f"{plugin:8s} queries={len(rs)} ratio range=[{min(rs):.3f}, {max(rs):.3f}]", rep.certificates)
