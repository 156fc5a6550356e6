"""CSV/JSON writers for traces, bound records and reports.

Output is deterministic: floats are written with ``repr`` and JSON keys are
sorted, so identical runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable

from .dynamics import BoundCheckRecord
from .scheme import IterationTrace
from .spaces import GeodesicSpace, Point

TRACE_COLUMNS = ["n", "t_n", "point", "step_dist", "theta", "rho",
                 "step_bound_residual", "monotone_residual"]
RECORD_COLUMNS = ["label", "lhs", "rhs", "residual", "n", "t", "p", "q", "x", "y"]


def point_str(space: GeodesicSpace, x: Point) -> str:
    return json.dumps(space.to_json(x), sort_keys=True, separators=(",", ":"))


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(v, dict):
        return {str(k): _jsonable(u) for k, u in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(u) for u in v]
    return v


def dumps(obj: Any) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def digest(obj: Any) -> str:
    """sha256 of the canonical JSON form of ``obj``."""
    return hashlib.sha256(json.dumps(_jsonable(obj), sort_keys=True,
                                     separators=(",", ":")).encode()).hexdigest()


def trace_csv(trace: IterationTrace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for s in trace.steps:
        w.writerow([s.n, _cell(s.t), point_str(trace.space, s.x), _cell(s.step_dist),
                    _cell(s.theta), _cell(s.rho), _cell(s.step_bound_residual),
                    _cell(s.monotone_residual)])
    return buf.getvalue()


def records_csv(space: GeodesicSpace, records: Iterable[BoundCheckRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RECORD_COLUMNS)
    for r in records:
        pts = [point_str(space, r.inputs[k]) if isinstance(r.inputs.get(k), Point) else ""
               for k in ("p", "q", "x", "y")]
        w.writerow([r.label, _cell(r.lhs), _cell(r.rhs), _cell(r.residual), r.n, _cell(r.t), *pts])
    return buf.getvalue()


def write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)
