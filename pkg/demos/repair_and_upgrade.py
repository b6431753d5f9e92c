"""
Repairing and growing a coded cluster
=====================================

Distribute a file on 7 nodes with k=4, lose two nodes, regenerate them
from five helpers, then add three nodes and read the file back.
"""

from itertools import combinations

from crgc import bounds
from crgc.bounds import CodeParams
from crgc.codec import check_mds, concurrent_repair, distribute, reconstruct, upgrade
from crgc.gf import PrimeField
from crgc.matrix import random_matrix

field = PrimeField(257)
params = CodeParams(12, 7, 4, 5, 2)        # alpha = d - k + t = 3 packets per node

# the file is 12 packets of 8 symbols
source = random_matrix(12, 8, field, seed=1)
cluster = distribute(source, params, field, seed=2)
print(f"{cluster.n} nodes, {cluster.alpha} packets each, MDS: {bool(check_mds(cluster))}")

# nodes 1 and 2 fail; the engine pulls 2 packets from each of 5 helpers
cluster.remove([1, 2])
_, rep = concurrent_repair(cluster, [1, 2], [3, 4, 5, 6, 7], seed=3)
print("repair downloaded", rep.helper_to_engine, "packets, bound", bounds.core_ms_bound(12, 4, 5, 2))

# (7,4) -> (8,4): six helpers send one packet each
_, rep = upgrade(cluster, 1, [1, 2, 3, 4, 5, 6], [1] * 6, seed=4)
print("upgrade by 1 downloaded", rep.helper_to_engine)

# (8,4) -> (10,4) with an uneven download vector
_, rep = upgrade(cluster, 2, [1, 2, 3, 4, 5, 6], [2, 2, 2, 2, 1, 1], seed=5)
print("upgrade by 2 downloaded", rep.helper_to_engine,
      "bound", bounds.min_upgrade_bandwidth(12, 4, 6, 2)[0])

# any 4 of the 10 nodes still give back the file
ok = all(reconstruct([cluster.nodes[i] for i in ids], cluster) == source
         for ids in combinations(cluster.ids, 4))
print("all", len(list(combinations(cluster.ids, 4))), "subsets reconstruct:", ok)
