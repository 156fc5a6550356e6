"""Geodesic metric-space laboratory: CAT(0) model spaces, sampled audits of
convexity and curvature inequalities, Lipschitz maps and two-map iterations."""

from .audit import (INF, AuditSpec, ModulusProbe, check_busemann, check_cat0,
                    check_convex_structure, check_implication, check_midpoint_pair_bound,
                    check_p_convexity, estimate_uc_modulus, is_eps_separated)
from .dynamics import (BoundCheckRecord, DecayReport, QtConfig, ZtResult, check_decay,
                       check_iterated_bound, check_slice_bounds, check_two_map_bound, compute_zt,
                       qt_apply)
from .maps import (Affine, BallProjection, Compose, Contraction, DiskRotation, FixedPointResult,
                   Identity, LipschitzMap, RigidMotion, TreeAutomorphism, apply,
                   audit_lipschitz, banach_fixed_point, estimate_lipschitz, iterate,
                   map_from_json, power)
from .reports import ViolationReport
from .scheme import (Interval, IterationTrace, ScheduleConfig, audit_monotone,
                     audit_product_bound, audit_step_bound, compute_rho, compute_theta,
                     run_scheme, suggest_blend)
from .spaces import (Euclidean, GeodesicSpace, InvalidPointError, MetricTree, PoincareDisk, Point,
                     coerce_point,
                     SpaceMismatchError, TreePos, audit_metric_axioms, path4, space_from_name,
                     star3)

__version__ = "0.1.0"
