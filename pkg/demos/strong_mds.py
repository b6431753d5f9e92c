"""
Reading partial nodes
=====================

A strong-MDS code lets a collector take a few packets from many nodes
instead of whole nodes.  After regenerating every systematic node we try
every way of reading B=9 packets from 6 nodes.
"""

import numpy as np

from crgc.bounds import CodeParams
from crgc.codec import concurrent_repair, distribute, strong_mds_sweep
from crgc.gf import PrimeField

params = CodeParams(9, 6, 3, 3, 3)
rates = []
for seed in range(10):
    cluster = distribute(None, params, PrimeField(257), seed=seed)
    concurrent_repair(cluster, [1, 2, 3], [4, 5, 6], seed=seed)
    sweep = strong_mds_sweep(cluster)
    rates.append(sweep.pass_rate)
    print(f"seed {seed}: {sweep.passed}/{sweep.total}", sweep.failures or "")

# over F_257 about one vector in 256 lands on a singular matrix
print("mean pass rate", np.mean(rates))

# a smaller field makes the rank failures easy to see
cluster = distribute(None, params, PrimeField(11), seed=0)
print("F_11:", strong_mds_sweep(cluster).pass_rate)
