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
# # Dynamic all-pairs shortest paths with metric j-trees
#
# Low-stretch trees plus a few forced edges give metric j-trees; a sample of
# them answers distance queries as an upper bound that never undercuts the
# true distance.

# %%
import random

from dynsparse import oracles
from dynsparse.graph import DynamicGraph
from dynsparse.metric import DynamicAPSP

rng = random.Random(4)
n = 60
g = DynamicGraph(n, max_ratio=None)
for i in range(1, n):
    g.insert_edge(i, rng.randrange(i), rng.uniform(1, 10))
while g.m < 150:
    g.insert_edge(*rng.sample(range(n), 2), rng.uniform(1, 10))
ap = DynamicAPSP(g, seed=4)
print("rho_emp =", round(ap.rho_emp, 3), "alpha =", ap.dec.alpha)

# %%
ratios = []
for step in range(150):
    if step % 3 == 2:
        ap.insert(*rng.sample(range(n), 2), rng.uniform(1, 10))
        continue
    s, t = rng.sample(range(n), 2)
    ratios.append(ap.query(s, t) / oracles.exact_distance(g.snapshot(), s, t))
print(f"queries {len(ratios)}  ratio range [{min(ratios):.3f}, {max(ratios):.3f}]  rebuilds {ap.builds}")
