"""Result containers shared by the audits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any


@dataclass
class ViolationReport:
    """Outcome of a sampled inequality audit.

    ``worst_residual`` is the minimum of RHS - LHS over all samples, so a
    negative value is a violation. ``witness`` holds the sampled arguments
    that produced it and can be fed back to the residual function.
    """

    check: str
    space: str
    checked: int
    worst_residual: float
    witness: dict[str, Any] | None
    tol: float
    params: dict[str, Any] = field(default_factory=dict)
    max_residual: float = -math.inf
    extras: dict[str, Any] = field(default_factory=dict)
    status: str | None = None

    @property
    def passed(self) -> bool:
        if self.status == "inconclusive":
            return True
        if self.status == "failed":
            return False
        return self.worst_residual >= -self.tol

    def to_dict(self, space=None) -> dict[str, Any]:
        from .spaces import encode_value

        witness = None
        if self.witness is not None:
            witness = {k: encode_value(v, space) for k, v in self.witness.items()}
        return {
            "check": self.check,
            "space": self.space,
            "p": _json_p(self.params.get("p")),
            "samples": self.checked,
            "worst_residual": _json_float(self.worst_residual),
            "max_residual": _json_float(self.max_residual),
            "passed": self.passed,
            "status": self.status or ("passed" if self.passed else "violated"),
            "tol": self.tol,
            "params": {k: _json_p(v) if k == "p" else v for k, v in self.params.items()},
            "extras": {k: _json_float(v) if isinstance(v, float) else v
                       for k, v in self.extras.items()},
            "witness": witness,
        }


class Tracker:
    """Running minimum/maximum of residuals with the witness of the minimum."""

    def __init__(self):
        self.count = 0
        self.worst = math.inf
        self.best = -math.inf
        self.witness = None

    def add(self, residual: float, witness: dict[str, Any]) -> None:
        self.count += 1
        if residual < self.worst or self.witness is None:
            self.worst = residual
            self.witness = witness
        if residual > self.best:
            self.best = residual

    def report(self, check, space, tol, params=None, **kw) -> ViolationReport:
        worst = self.worst if self.count else 0.0
        best = self.best if self.count else 0.0
        return ViolationReport(check=check, space=space, checked=self.count,
                               worst_residual=worst, witness=self.witness, tol=tol,
                               params=dict(params or {}), max_residual=best, **kw)


def merge_reports(reports: list[ViolationReport]) -> ViolationReport:
    """Merge reports of the same check computed on disjoint sample partitions."""
    if not reports:
        raise ValueError("nothing to merge")
    worst = min(reports, key=lambda r: r.worst_residual)
    return ViolationReport(
        check=worst.check, space=worst.space,
        checked=sum(r.checked for r in reports),
        worst_residual=worst.worst_residual, witness=worst.witness, tol=worst.tol,
        params=dict(worst.params),
        max_residual=max(r.max_residual for r in reports),
        extras=dict(worst.extras),
        status="failed" if any(r.status == "failed" for r in reports) else worst.status,
    )


def _json_float(v):
    if v is None:
        return None
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    return v


def _json_p(p):
    if isinstance(p, float) and math.isinf(p):
        return "inf"
    return p
