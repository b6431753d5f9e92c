"""
Storage versus repair bandwidth
===============================

Trace the minimum storage alpha* for every total repair bandwidth gamma
and compare the extreme points against independent single-node repair.
"""

import numpy as np

from crgc import bounds
from crgc.bounds import CodeParams

params = CodeParams(18, 14, 6, 10, 3)
curve = bounds.tradeoff_curve(params, 9)

gamma = np.array([float(pt.gamma) for pt in curve])
alpha = np.array([float(pt.alpha) for pt in curve])
for g, a, pt in zip(gamma, alpha, curve):
    print(f"gamma={g:7.3f}  alpha={a:6.3f}  {pt.regime}")

# with g = 2 groups there is a single linear segment between the ends
print("d(alpha)/d(gamma):", np.round(np.diff(alpha) / np.diff(gamma), 3))

# each point needs exactly B through the weakest cut
for pt in curve:
    assert bounds.capacity_bruteforce(params, pt.alpha, pt.gamma / params.d) == params.B

# concurrent repair of t=6 versus one-at-a-time repair (t=1) at the MB end
conc = bounds.mb_point(CodeParams(1, 19, 10, 13, 6))
single = bounds.mb_point(CodeParams(1, 19, 10, 18, 1))
print(f"MB storage: {float(conc.alpha):.4f}B concurrent, {float(single.alpha):.4f}B single")

# when t does not divide k the printed MB formula overshoots the real end
p = CodeParams(1, 19, 10, 13, 6)
print("formula end", bounds.mb_point(p), "\ntrue end   ", bounds.min_bandwidth_point(p))
