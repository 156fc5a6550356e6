"""Two-step geodesic iteration ``x_{n+2} = t_n S_n x_{n+1} (+) (1 - t_n) T_n x_n``.

Along a run we record, for every index ``k >= 1``, the certificate::

    theta_k = [d(S x_{k+1}, T x_{k-1}) + d(S x_k, T x_{k-1})
               + d(T x_k, S x_k) + d(S x_{k+1}, T x_k)] / max(d(x_k, x_{k+1}), d(x_{k-1}, x_k))

(maps taken at step ``k - 1``) and ``rho_k = t_k^2 K_S^2 + (1-t_k)^2 K_T^2
+ t_k (1-t_k) min(K_S, K_T) theta_k``. ``theta_k`` needs ``x_{k+1}``, so the
certificates trail the trajectory by one step. Zero denominators mean the
iterates have stalled; ``theta`` and ``rho`` are then None and the bounds
that use them pass vacuously.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

from .dynamics import BoundCheckRecord
from .maps import LipschitzMap
from .reports import Tracker, ViolationReport
from .spaces import GeodesicSpace, Point

Schedule = Union[float, Sequence[float], Callable[[int], float]]


class InsufficientTraceError(ValueError):
    """The trace is too short for the requested audit."""


@dataclass
class ScheduleConfig:
    """Blend weights, maps and initial points of a run.

    ``t_schedule`` is a constant, a list indexed by step, or a callable
    ``n -> t_n``. ``S`` and ``T`` are single maps (constant sequences) or
    per-step lists.
    """

    t_schedule: Schedule
    S: LipschitzMap | Sequence[LipschitzMap]
    T: LipschitzMap | Sequence[LipschitzMap]
    n_steps: int
    x0: Point
    x1: Point
    stop_tol: float = 1e-15

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if not self.stop_tol > 0:
            raise ValueError("stop_tol must be positive")
        for seq in (self.t_schedule, self.S, self.T):
            if isinstance(seq, (list, tuple)) and len(seq) < self.n_steps:
                raise ValueError("per-step schedules must cover n_steps entries")
        if not callable(self.t_schedule) and not isinstance(self.t_schedule, (list, tuple)):
            if not 0.0 <= float(self.t_schedule) <= 1.0:
                raise ValueError(f"t={self.t_schedule} outside [0, 1]")

    def t_at(self, n: int) -> float | None:
        ts = self.t_schedule
        if callable(ts):
            t = float(ts(n))
        elif isinstance(ts, (list, tuple)):
            if n >= len(ts):
                return None
            t = float(ts[n])
        else:
            t = float(ts)
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"t_{n}={t} outside [0, 1]")
        return t

    def S_at(self, n: int) -> LipschitzMap | None:
        return _pick(self.S, n)

    def T_at(self, n: int) -> LipschitzMap | None:
        return _pick(self.T, n)


def _pick(seq, n):
    if isinstance(seq, (list, tuple)):
        return seq[n] if n < len(seq) else None
    return seq


@dataclass
class TraceStep:
    n: int
    t: float | None
    x: Point
    step_dist: float | None = None        # d(x_n, x_{n+1})
    theta: float | None = None            # theta_n
    rho: float | None = None              # rho_n
    step_bound_residual: float | None = None  # rho_{n+1} max(a_{n+1}^2, a_n^2) - a_{n+2}^2
    monotone_residual: float | None = None    # a_n - a_{n+2}


@dataclass
class IterationTrace:
    space: GeodesicSpace
    cfg: ScheduleConfig
    steps: list[TraceStep] = field(default_factory=list)
    stopped_early: bool = False

    @property
    def points(self) -> list[Point]:
        return [s.x for s in self.steps]

    @property
    def step_dists(self) -> list[float]:
        return [s.step_dist for s in self.steps if s.step_dist is not None]

    @property
    def converged(self) -> bool:
        a = self.step_dists
        return bool(a) and a[-1] <= self.cfg.stop_tol


def compute_rho(t: float, K_S: float, K_T: float, theta: float) -> float:
    """``t^2 K_S^2 + (1-t)^2 K_T^2 + t (1-t) min(K_S, K_T) theta``."""
    s = 1.0 - t
    return t * t * K_S * K_S + s * s * K_T * K_T + t * s * min(K_S, K_T) * theta


def compute_theta(space: GeodesicSpace, xs: Sequence[Point], n: int, S: LipschitzMap,
                  T: LipschitzMap) -> float | None:
    """``theta_{n+1}`` from ``x_n, x_{n+1}, x_{n+2}`` and the step-``n`` maps.

    None when ``max(d(x_{n+1}, x_{n+2}), d(x_n, x_{n+1})) == 0``.
    """
    d = space.distance
    x0, x1, x2 = xs[n], xs[n + 1], xs[n + 2]
    den = max(d(x1, x2), d(x0, x1))
    if den == 0.0:
        return None
    sx2, sx1 = S(space, x2), S(space, x1)
    tx0, tx1 = T(space, x0), T(space, x1)
    return (d(sx2, tx0) + d(sx1, tx0) + d(tx1, sx1) + d(sx2, tx1)) / den


def run_scheme(space: GeodesicSpace, cfg: ScheduleConfig) -> IterationTrace:
    """Run the scheme for ``cfg.n_steps`` steps (fewer if two consecutive step
    distances fall to ``stop_tol``) and attach all certificates."""
    space.check(cfg.x0, cfg.x1)
    xs = [cfg.x0, cfg.x1]
    a = [space.distance(cfg.x0, cfg.x1)]
    stopped = False
    for n in range(cfg.n_steps):
        S, T, t = cfg.S_at(n), cfg.T_at(n), cfg.t_at(n)
        nxt = space.combine(S(space, xs[n + 1]), T(space, xs[n]), t)
        step = space.distance(xs[n + 1], nxt)
        if not math.isfinite(step):
            raise FloatingPointError(f"non-finite step distance at step n={n}")
        xs.append(nxt)
        a.append(step)
        if a[-1] <= cfg.stop_tol and a[-2] <= cfg.stop_tol and n + 1 < cfg.n_steps:
            stopped = True
            break

    N = len(xs) - 1
    steps = [TraceStep(n=k, t=cfg.t_at(k) if k < cfg.n_steps else None, x=xs[k],
                       step_dist=a[k] if k < N else None) for k in range(N + 1)]
    for k in range(1, N):
        S, T = cfg.S_at(k - 1), cfg.T_at(k - 1)
        theta = compute_theta(space, xs, k - 1, S, T)
        steps[k].theta = theta
        t, Sk, Tk = cfg.t_at(k), cfg.S_at(k), cfg.T_at(k)
        if theta is not None and t is not None and Sk is not None and Tk is not None:
            steps[k].rho = compute_rho(t, Sk.declared_k, Tk.declared_k, theta)
    for n in range(N - 2):
        steps[n].monotone_residual = a[n] - a[n + 2]
        rho = steps[n + 1].rho
        if rho is not None:
            steps[n].step_bound_residual = rho * max(a[n + 1] ** 2, a[n] ** 2) - a[n + 2] ** 2
    return IterationTrace(space, cfg, steps, stopped)


# ---------------------------------------------------------------------------
# audits over a finished trace


def _tol(trace, tol):
    return trace.space.default_tol if tol is None else tol


def audit_step_bound(trace: IterationTrace, tol: float | None = None) -> ViolationReport:
    """``d^2(x_{n+2}, x_{n+3}) <= rho_{n+1} max(d^2(x_{n+1}, x_{n+2}), d^2(x_n, x_{n+1}))``
    at every ``n`` where ``rho_{n+1}`` is defined."""
    if len(trace.steps) < 4 and not trace.stopped_early:
        raise InsufficientTraceError("step bound needs at least 4 trace points")
    tr = Tracker()
    vacuous = 0
    for s in trace.steps:
        if s.step_bound_residual is not None:
            tr.add(s.step_bound_residual, {"n": s.n})
        elif s.monotone_residual is not None:
            vacuous += 1
    rep = tr.report("step_bound", trace.space.id, _tol(trace, tol))
    rep.extras["vacuous"] = vacuous
    return rep


def audit_product_bound(trace: IterationTrace, n: int, m: int,
                        tol: float | None = None) -> BoundCheckRecord:
    """``d^2(x_{n+m}, x_{n+m+1}) <= (prod_{i<m} rho_{n+i}) max(d^2(x_{n+1}, x_{n+2}), d^2(x_n, x_{n+1}))``.

    Vacuous (lhs = rhs = 0) when some ``rho_{n+i}`` is undefined or the run
    stopped early before reaching the indices.
    ``chain["first_link"]`` is the residual of the one-step bound
    ``d^2(x_{n+m}, x_{n+m+1}) <= rho_{n+m-1} max(d^2(x_{n+m-1}, x_{n+m}), d^2(x_{n+m-2}, x_{n+m-1}))``
    that precedes the product.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    a = trace.step_dists
    inputs = {"n": n, "m": m}
    if n < 0 or n + m >= len(a):
        if trace.stopped_early and n >= 0:
            return BoundCheckRecord(0.0, 0.0, 0.0, inputs, n=n, label="product_vacuous")
        raise InsufficientTraceError(f"trace does not cover indices {n}..{n + m + 1}")
    rhos = [trace.steps[n + i].rho for i in range(m)]
    if any(r is None for r in rhos):
        return BoundCheckRecord(0.0, 0.0, 0.0, inputs, n=n, label="product_vacuous")
    lhs = a[n + m] ** 2
    rhs = math.prod(rhos) * max(a[n + 1] ** 2, a[n] ** 2)
    first = rhos[-1] * max(a[n + m - 1] ** 2, a[n + m - 2] ** 2) - lhs
    return BoundCheckRecord(lhs, rhs, rhs - lhs, inputs, n=n, label="product",
                            chain={"first_link": first})


def audit_monotone(trace: IterationTrace, tol: float | None = None) -> ViolationReport:
    """``d(x_{n+2}, x_{n+3}) <= d(x_n, x_{n+1})``, strict when every ``rho < 1``.

    Hypotheses: ``d(x_{k+1}, x_{k+2}) <= d(x_k, x_{k+1})`` at the start index
    ``k`` and ``rho <= 1`` from there on. The start index is the first ``k``
    meeting the first hypothesis (``k = 0`` when the initial pair does);
    the tail from ``x_k`` is itself a run of the scheme. The report is
    inconclusive when no start index exists or some ``rho > 1``.
    """
    a = trace.step_dists
    if len(a) < 3 and not trace.stopped_early:
        raise InsufficientTraceError("monotonicity needs at least 4 trace points")
    tol_ = _tol(trace, tol)
    start = next((k for k in range(len(a) - 1) if a[k + 1] <= a[k]), None)
    tr = Tracker()
    if start is None:
        rep = tr.report("monotone", trace.space.id, tol_, status="inconclusive")
        rep.extras["reason"] = "no index with d(x_{k+1}, x_{k+2}) <= d(x_k, x_{k+1})"
        return rep
    rhos = [s.rho for s in trace.steps[start + 1:] if s.rho is not None]
    if any(r > 1.0 for r in rhos):
        rep = tr.report("monotone", trace.space.id, tol_, status="inconclusive")
        rep.extras.update(reason="some rho_n > 1", start_index=start, max_rho=max(rhos))
        return rep
    strict = bool(rhos) and all(r < 1.0 for r in rhos)
    strict_failures = []
    for n in range(start, len(a) - 2):
        tr.add(a[n] - a[n + 2], {"n": n})
        if strict and a[n] > 0.0 and not a[n + 2] < a[n]:
            strict_failures.append(n)
    rep = tr.report("monotone", trace.space.id, tol_)
    rep.extras.update(start_index=start, strict_required=strict,
                      strict_failures=strict_failures, max_rho=max(rhos) if rhos else None)
    if strict_failures:
        rep.status = "failed"
    return rep


# ---------------------------------------------------------------------------
# choosing the blend weight


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __contains__(self, t: float) -> bool:
        above = t >= self.lo if self.lo_closed else t > self.lo
        below = t <= self.hi if self.hi_closed else t < self.hi
        return above and below


def _quadratic_roots(A, B, C):
    scale = max(abs(A), abs(B), abs(C))
    if scale == 0.0:
        return []
    if abs(A) <= 1e-14 * scale:
        return [] if B == 0.0 else [-C / B]
    disc = B * B - 4.0 * A * C
    if disc < 0.0:
        return []
    sq = math.sqrt(disc)
    # numerically stable pair
    qq = -0.5 * (B + math.copysign(sq, B)) if B != 0.0 else -0.5 * sq
    roots = [C / qq] if qq != 0.0 else []
    roots.append(qq / A)
    return sorted(set(roots))


def suggest_blend(K_S: float, K_T: float, theta_bound: float,
                  strict: bool = False) -> list[Interval]:
    """Blend weights ``t`` in [0, 1] with ``rho(t) <= 1`` (``< 1`` if strict).

    ``rho(t) - 1`` is a quadratic in ``t``; the answer is a union of at most
    two intervals, returned in increasing order (empty list if none).
    """
    if theta_bound < 0 or K_S < 0 or K_T < 0:
        raise ValueError("constants and theta bound must be nonnegative")
    m = min(K_S, K_T)
    A = K_S * K_S + K_T * K_T - m * theta_bound
    B = -2.0 * K_T * K_T + m * theta_bound
    C = K_T * K_T - 1.0

    def f(t):
        return compute_rho(t, K_S, K_T, theta_bound) - 1.0

    def ok(v, at_root=False):
        if at_root:
            return not strict
        return v < 0.0 if strict else v <= 0.0

    roots = [r for r in _quadratic_roots(A, B, C) if 0.0 < r < 1.0]
    marks = [0.0] + roots + [1.0]
    # membership of each mark and of each open gap between marks
    point_in = [ok(f(0.0))] + [ok(0.0, at_root=True)] * len(roots) + [ok(f(1.0))]
    gap_in = [ok(f(0.5 * (lo + hi))) for lo, hi in zip(marks, marks[1:])]

    out: list[Interval] = []
    cur = None  # [lo, lo_closed] of the interval being built
    for i, mark in enumerate(marks):
        if cur is not None and not point_in[i]:
            out.append(Interval(cur[0], mark, cur[1], False))
            cur = None
        if cur is None and point_in[i]:
            cur = [mark, True]
        if i == len(marks) - 1:
            if cur is not None:
                out.append(Interval(cur[0], mark, cur[1], True))
            break
        if gap_in[i]:
            if cur is None:
                cur = [mark, False]
        elif cur is not None:
            out.append(Interval(cur[0], mark, cur[1], True))
            cur = None
    return out
