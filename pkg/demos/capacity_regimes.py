"""
Capacity of concurrent repair
=============================

How much data can a collector pull through the information flow graph when
t nodes fail together and are regenerated from d helpers?
"""

from fractions import Fraction

from crgc import bounds
from crgc.bounds import CodeParams

# (n, k, d, t) = (14, 6, 10, 3): two repair groups of three nodes each
params = CodeParams(18, 14, 6, 10, 3)

# sweep alpha with beta fixed at one packet
for alpha in [Fraction(j, 2) for j in range(1, 11)]:
    value, u = bounds.closed_form_argmin(params, alpha, 1)
    print(f"alpha={str(alpha):>4}  C={str(value):>4}  cut through groups {list(u)}")

# storage-limited below 7/3, bandwidth-limited above 10/3, mixed in between

# The closed form only looks at compositions with g - 1 full groups.
# Check it against every composition of k into parts of at most t.
params = CodeParams(21, 14, 7, 10, 3)
print(len(bounds.enumerate_compositions(7, 3)), "compositions of 7 with parts <= 3")
for alpha in (2, 3, 4, 9, 11):
    brute, argmin = bounds.capacity_argmin(params, alpha, 1)
    closed = bounds.capacity_closed_form(params, alpha, 1)
    print(f"alpha={alpha:>2}  closed={closed}  brute={brute}  minimisers={argmin}")

# when t does not divide k the remainder group is not always cheapest first
print(bounds.optimal_composition(7, 3), "in argmin at alpha=9:",
      bounds.optimal_composition(7, 3) in bounds.capacity_argmin(params, 9, 1)[1])
