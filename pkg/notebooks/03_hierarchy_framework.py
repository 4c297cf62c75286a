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
# # Sparsifier hierarchy
#
# Level i keeps a vertex sparsifier of level i-1 and is rebuilt once its
# operation counter passes the threshold.  With TZ levels the stretch
# telescopes to (2r-1)^levels.

# %%
from dynsparse.traces import RunConfig, gen_trace, run_trace

text = gen_trace("random-gnm", 100, 150, 400, 0.2, seed=1, delete_rate=0.0)
rep = run_trace(RunConfig("incremental", levels=2, r=2, oracle_check=True), text)
rs = rep.ratios()
print(f"queries={len(rs)} max ratio={max(rs):.3f} (bound 9)")
print(rep.summary())
