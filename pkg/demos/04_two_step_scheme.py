"""
The two-step blended scheme
===========================

``x_{n+2} = combine(S x_{n+1}, T x_n, t_n)``. Each step carries a ratio
``theta`` and a certificate ``rho``; the one-step bound and the monotonicity
audit read them off the finished trace.
"""

from cat0lab import (Contraction, Euclidean, PoincareDisk, ScheduleConfig, audit_monotone,
                     audit_product_bound, audit_step_bound, run_scheme, suggest_blend)

E = Euclidean(1)
c = Contraction(E.point(0), 0.5)
trace = run_scheme(E, ScheduleConfig(0.5, c, c, 40, E.point(1), E.point(1)))

# %%
# The first few iterates and certificates.
for s in trace.steps[:6]:
    print(f"n={s.n}  x={s.x.value[0]:.6f}  step={s.step_dist}  theta={s.theta}  rho={s.rho}")

# %%
# Audits over the whole trace.
print("\nstep bound:", audit_step_bound(trace).passed)
mono = audit_monotone(trace)
print("monotone  :", mono.passed, "strict" if mono.extras["strict_required"] else "")

# %%
# Chaining the one-step bound does not give the product bound: at n = 1
# the second step is larger than the first.
rec = audit_product_bound(trace, 1, 2)
print(f"\nproduct bound n=1 m=2: lhs {rec.lhs}  rhs {rec.rhs}  residual {rec.residual:+.6f}")

# %%
# On the disk with stronger constants.
D = PoincareDisk()
S, T = Contraction(D.point(0.3 + 0.1j), 0.9), Contraction(D.point(-0.2 + 0.4j), 0.9)
tr = run_scheme(D, ScheduleConfig(0.5, S, T, 200, D.point(0.5), D.point(-0.5j)))
print(f"\ndisk: final step {tr.step_dists[-1]:.2e}, step bound {audit_step_bound(tr).passed}, "
      f"monotone {audit_monotone(tr).passed}")

# %%
# Which blend weights keep rho <= 1 when K_S = 2, K_T = 0.5, theta <= 2?
for iv in suggest_blend(2.0, 0.5, 2.0):
    print(f"\nt in [{iv.lo}, {iv.hi:.6f}]")
