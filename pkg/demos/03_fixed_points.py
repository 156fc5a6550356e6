"""
Contractions and their blended fixed points
===========================================

Two affine contractions of the line, ``S x = x/2 + 2`` and ``T x = x/2``,
fix 4 and 0. Blending their fixed points along the geodesic gives ``z_t``,
which is not the fixed point of the blended map.
"""

import numpy as np

from cat0lab import (Contraction, Euclidean, QtConfig, banach_fixed_point, check_decay,
                     check_two_map_bound, compute_zt)
from cat0lab.dynamics import batch_two_map

E = Euclidean(1)
S = Contraction(E.point(4), 0.5)
T = Contraction(E.point(0), 0.5)

# %%
# Banach iteration.
for name, m in (("S", S), ("T", T)):
    res = banach_fixed_point(E, m, E.point(10))
    print(f"fixed point of {name}: {res.point.value[0]:.12f} after {res.iterations} steps")

# %%
# z_t = t p* + (1 - t) y*.
for t in (0.0, 0.25, 0.5, 0.75, 1.0):
    res = compute_zt(E, QtConfig(t, S, T), E.point(0), E.point(0))
    print(f"t={t:4.2f}  z_t={res.point.value[0]:.9f}  "
          f"fixed point of u -> Q_t(p*, T u) = {res.blend_fixed_point.value[0]:.9f}")

# %%
# The two-map bound on random tuples, and one equality case.
cfg = QtConfig(0.3, S, T)
worst = min(r.residual for r in batch_two_map(E, cfg, 500, seed=0))
print("\nworst two-map residual over 500 tuples:", worst)
rec = check_two_map_bound(E, QtConfig(0.5, Contraction(E.point(0), 1.0), Contraction(E.point(0), 1.0)),
                          E.point(0), E.point(1), E.point(0), E.point(1))
print("equality case: lhs", rec.lhs, "rhs", rec.rhs)

# %%
# Geometric decay of d(Q_t(S^n p, T^n x), Q_t(S^n q, T^n y)).
rep = check_decay(E, cfg, E.point(0), E.point(1), E.point(0), E.point(1), 40)
print(f"\ndecay mode {rep.mode}: d_40 = {rep.final_distance:.2e}, slope {rep.log_slope:.4f}"
      f" (log 0.5 = {np.log(0.5):.4f})")
