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
# # Dynamic min s-t cut with j-trees
#
# A multiplicative-weights loop builds a distribution over j-trees whose
# cuts dominate the graph's.  Estimates are never below the true min cut and
# are within 2 rho_emp of it for most pairs.

# %%
import random

from dynsparse import oracles
from dynsparse.graph import DynamicGraph
from dynsparse.jtree import OBLIVIOUS, CutDecomposition

rng = random.Random(3)
n = 40
g = DynamicGraph(n, max_ratio=None)
for i in range(1, n):
    g.insert_edge(i, rng.randrange(i), rng.uniform(1, 10))
while g.m < 120:
    g.insert_edge(*rng.sample(range(n), 2), rng.uniform(1, 10))
dec = CutDecomposition(g, mode=OBLIVIOUS, seed=3)
print("rho_emp =", round(dec.rho_emp, 3), "trees =", len(dec.result.trees), "j =", dec.j)

# %%
ratios = []
for _ in range(50):
    s, t = rng.sample(range(n), 2)
    ratios.append(dec.query(s, t) / oracles.min_cut_value(g.snapshot(), s, t))
print(f"min ratio {min(ratios):.3f}  max ratio {max(ratios):.3f}  C0 {dec.c0():.3f}")
