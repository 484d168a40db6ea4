"""
Raising the beneficiary count without losing units
==================================================

Each patient in EX2 benefits from one category, but a maximum matching can
swap them. A cycle of reassignments fixes it.
"""

import numpy as np

from reservematch import Matching, augment_chain, find_positive_chain, matching_stats, preset
from reservematch.maxinmax import build_chain_graph, chain_potential, search_chain_graph

inst = preset("example2")
mu = Matching({"i1": "c2", "i2": "c1"})
print("start:", dict(mu), matching_stats(inst, mu).as_tuple())

chain = find_positive_chain(inst, mu)
print(chain.kind.value, chain.sequence, "gain", chain_potential(inst, mu, chain))
after = augment_chain(inst, mu, chain)
print("after:", dict(after), matching_stats(inst, after).as_tuple())

# %% the same cycle read off the two-copy digraph
g = build_chain_graph(inst, mu)
for label in g.labels:
    print(label)
w = g.weight_matrix()
print("edge weights used:", sorted({int(x) for x in w[np.isfinite(w)]}))
print("literal search:", search_chain_graph(inst, mu))
print("after the swap:", find_positive_chain(inst, after))
