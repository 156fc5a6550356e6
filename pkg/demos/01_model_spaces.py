"""
Three model spaces
==================

Distances, geodesic blends and midpoints in the plane, the Poincaré disk
and a small metric tree. The blend ``combine(x, y, t)`` sits at distance
``(1 - t) d(x, y)`` from ``x``.
"""

import math

import numpy as np

from cat0lab import Euclidean, PoincareDisk, audit_metric_axioms, star3

# %%
# The plane: blends are ordinary affine combinations.
E = Euclidean(2)
x, y = E.point([0, 0]), E.point([2, 0])
print("d(x, y)               =", E.distance(x, y))
print("combine(x, y, 0.25)   =", E.combine(x, y, 0.25).value)
print("midpoint              =", E.midpoint(x, y).value)

# %%
# The disk: the hyperbolic midpoint of 0 and 1/2 is 2 - sqrt(3), not 1/4.
D = PoincareDisk()
o, h = D.point(0), D.point(0.5)
print("\nd_disk(0, 1/2)        =", D.distance(o, h), " log 3 =", math.log(3))
print("midpoint(0, 1/2)      =", D.midpoint(o, h).value, " 2 - sqrt 3 =", 2 - math.sqrt(3))

# %%
# A star with three unit legs: the midpoint of two leaves is the center.
T = star3()
a, b = T.node("a"), T.node("b")
print("\nd_tree(a, b)          =", T.distance(a, b))
print("midpoint(a, b) is c   :", T.midpoint(a, b) == T.node("c"))
z = T.combine(a, b, 0.75)
print("combine(a, b, 0.75)   =", z.value, " d(z, a) =", T.distance(z, a))

# %%
# Blends move at constant speed along the geodesic in every model.
rng = np.random.default_rng(0)
for space in (E, D, T):
    p, q = space.sample(rng), space.sample(rng)
    s, t = 0.2, 0.9
    gap = space.distance(space.combine(p, q, s), space.combine(p, q, t))
    print(f"{space.id:12s} |s - t| d(p, q) - d(blends) = {abs(s - t) * space.distance(p, q) - gap:+.2e}")

# %%
# Sampled metric axioms.
for space in (E, D, T):
    rep = audit_metric_axioms(space, 1000, seed=1)
    print(f"{space.id:12s} metric axioms passed={rep.passed} triangle={rep.extras['triangle']:.2e}")
