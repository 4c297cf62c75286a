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
# # Thorup-Zwick vertex sparsifier for distances
#
# Adding a terminal u links it to every vertex of its bunch B(u).  Distances
# between terminals in H stay within a factor 2r-1 of the true distances.

# %%
import random

from dynsparse import oracles
from dynsparse.graph import DynamicGraph
from dynsparse.tz import TzIvs

rng = random.Random(0)
n = 120
g = DynamicGraph(n, max_ratio=None)
for i in range(1, n):
    g.insert_edge(i, rng.randrange(i), rng.uniform(1, 10))
while g.m < 3 * n:
    g.insert_edge(*rng.sample(range(n), 2), rng.uniform(1, 10))

# %%
for r in (1, 2, 3):
    ivs = TzIvs(r).preprocess(g)
    T = rng.sample(range(n), 15)
    for u in T:
        ivs.add_terminal(u)
    H = ivs.graph.snapshot()
    worst = max(
        oracles.exact_distance(H, s, t) / oracles.exact_distance(g.snapshot(), s, t)
        for s in T for t in T if s < t
    )
    sizes = [len(a) for a in ivs.hierarchy.A]
    print(f"r={r} |A_i|={sizes} H edges={H.m} worst stretch={worst:.3f} (bound {2 * r - 1})")
