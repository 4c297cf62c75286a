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
# # Dynamic graphs and exact oracles
#
# `DynamicGraph` holds a weighted multigraph under edge insertions and
# deletions.  The oracles give exact distances, min cuts and effective
# resistances; every approximate structure is checked against them.

# %%
from dynsparse import oracles
from dynsparse.graph import DynamicGraph

g = DynamicGraph(4)
for u, v, w in [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (3, 0, 4.0)]:
    g.insert_edge(u, v, w)
view = g.snapshot()
print("d(0,2) =", oracles.exact_distance(view, 0, 2))
print("mincut(0,2) =", oracles.min_cut_value(view, 0, 2))
print("R(0,2) =", oracles.exact_effective_resistance(view, 0, 2))

# %% [markdown]
# Schur complement onto {0, 2}: the effective resistance between the kept
# vertices does not change.

# %%
S = oracles.exact_schur_complement(view, [0, 2])
print(S.matrix)
print("R on SC:", oracles.resistance_on_laplacian(S.matrix, 0, 1))
