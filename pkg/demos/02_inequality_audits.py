"""
Auditing convexity inequalities
===============================

Each audit samples points, evaluates ``residual = rhs - lhs`` and keeps the
worst sample as a witness. Flat space meets the CAT(0) inequality with
equality; the disk satisfies it with room to spare.
"""

import math

from cat0lab import (AuditSpec, Euclidean, ModulusProbe, PoincareDisk, check_busemann, check_cat0,
                     check_convex_structure, check_implication, check_p_convexity,
                     estimate_uc_modulus, star3)

spaces = [Euclidean(2), PoincareDisk(), star3()]
spec = AuditSpec(sample_count=5000, seed=42)

# %%
# The comparison inequality for triangles.
for s in spaces:
    rep = check_cat0(s, spec)
    print(f"{s.id:12s} cat0   worst {rep.worst_residual:+.2e}  largest {rep.max_residual:.2e}")

# %%
# p-convexity, Busemann curvature and the convex-structure inequality.
for s in spaces:
    rows = [("p=2 convexity", check_p_convexity(s, spec)),
            ("busemann p=1", check_busemann(s, AuditSpec(p=1.0, sample_count=5000, seed=1))),
            ("convex structure", check_convex_structure(s, spec))]
    for name, rep in rows:
        print(f"{s.id:12s} {name:17s} passed={rep.passed} worst={rep.worst_residual:+.2e}")

# %%
# A witness can be replayed: it carries the sampled points.
rep = check_cat0(PoincareDisk(), spec)
print("\nworst disk witness keys:", sorted(rep.witness))

# %%
# An implication between midpoint convexity notions, tested on samples.
rep = check_implication(Euclidean(2), "midpoint=>1-convex", spec)
print("implication on the plane:", rep.to_dict()["status"], "over", rep.checked, "samples")

# %%
# The modulus of uniform convexity of the plane at eps = 1, against 1 - sqrt(3)/2.
probe = estimate_uc_modulus(Euclidean(2), ModulusProbe(epsilon=1.0, r=1.0), 1.0,
                            AuditSpec(sample_count=20_000, seed=7))
print(f"\ndelta_hat = {probe.estimated_delta:.6f}  closed form = {1 - math.sqrt(3) / 2:.6f}")
