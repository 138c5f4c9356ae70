"""Structured verification reports and their JSON/CSV emission.

Every check in the toolkit produces a VerificationReport: what was checked
(check_id, provenance anchor), with which inputs, the computed values, a
scalar residual against a tolerance, and the resulting pass flag.  The pass
flag is always derived as residual <= tolerance; it is never set by hand.

Emission is deterministic: identical reports serialize to identical bytes
(runtime_ms can be zeroed for byte-level comparisons across runs).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

# Anchor registry: every report names the formula or construction it checks
# with one of these identifiers.  The human phrase says what the anchor is;
# reports carry the identifier.
ANCHORS = {
    "profile-ode": "the interval profile ODE t^2 Psi'' - 2(2m-1) t Psi' + 2m(2m-1) Psi = c t^2 - d t - e",
    "profile-boundary-conditions": "profile boundary conditions Psi(a)=Psi(b)=0, Psi'(a)=2, Psi'(b)=-2",
    "profile-general-solution": "general solution shape A t^(2m) + B t^(2m-1) + particular quadratic part",
    "closed-form-coefficients": "printed rational closed forms for (A, c, d, e) as functions of (m, a, b, B)",
    "unit-interval-special-case": "the explicit (a,b)=(1,2) family with vanishing base scalar",
    "profile-positivity-lemma": "positivity of alpha t^(2m) + beta t^(2m-1) + gamma t^2 + delta t + eps with alpha*delta > 0 and the stated boundary data",
    "extremality-affine-criterion": "f-extremality on the ansatz: the conformal scalar curvature is affine, S = d t + e",
    "ckem-constancy": "constant conformal scalar curvature (d = 0) characterizing the Einstein-Maxwell case",
    "conformal-scalar-relation": "S_f = 2 (2m-1)/(m-1) f^(m+1) Delta(f^(1-m)) + S_J f^2",
    "weighted-average-ratio": "cbar as the f^(-(2m+1))-weighted average of S_f",
    "futaki-character": "Fut(u) = Int (S_f - cbar) u f^(-(2m+1)) dmu",
    "metric-independence": "independence of the weighted integrals from the choice of compatible metric",
    "calabi-energy-variation": "weighted Calabi energy Int S_f^2 f^(-(2m+1)) and its first variation",
    "blowup-critical-catalog": "the seven critical slope families (a(p), b(p)) on the blow-up polygon",
    "blowup-positivity-domain": "positivity cone c, b+c, pa+(1-p)b+c, pa+c > 0 of the Killing potential",
    "quartic-alpha-root": "the smallest positive root of p^4 - 4p^3 + 16p^2 - 16p + 4",
    "toric-calibration": "scalar-curvature calibrations: constant curvature on the simplex, boundary-measure integral identity",
    "quadrature-plumbing": "interior polygon quadrature (fan triangulation, conical Gauss rules)",
}

_FIELD_ORDER = ("check_id", "inputs", "computed", "residual", "tolerance", "pass",
                "provenance", "seed", "runtime_ms")


@dataclass
class VerificationReport:
    check_id: str
    inputs: dict
    computed: dict
    residual: float
    tolerance: float
    passed: bool
    provenance: str
    seed: int | None = None
    runtime_ms: int = 0

    def __post_init__(self) -> None:
        if self.provenance not in ANCHORS:
            raise ValueError(f"unknown provenance anchor {self.provenance!r}")
        expected = _pass_rule(self.residual, self.tolerance)
        if self.passed != expected:
            raise ValueError("pass flag must equal (residual <= tolerance)")

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "inputs": _plain(self.inputs),
            "computed": _plain(self.computed),
            "residual": _plain(self.residual),
            "tolerance": _plain(self.tolerance),
            "pass": self.passed,
            "provenance": self.provenance,
            "seed": self.seed,
            "runtime_ms": int(self.runtime_ms),
        }


def _pass_rule(residual: float, tolerance: float) -> bool:
    return bool(residual <= tolerance) and math.isfinite(residual)


def make_report(check_id: str, *, inputs: dict, computed: dict, residual: float,
                tolerance: float, provenance: str, seed: int | None = None,
                runtime_ms: int = 0) -> VerificationReport:
    """Build a report with the pass flag derived from residual <= tolerance."""
    residual = float(residual)
    return VerificationReport(
        check_id=check_id, inputs=_plain(inputs), computed=_plain(computed),
        residual=residual, tolerance=float(tolerance),
        passed=_pass_rule(residual, float(tolerance)),
        provenance=provenance, seed=seed, runtime_ms=runtime_ms)


def _plain(value):
    """Recursively convert numpy scalars/arrays to plain Python types."""
    import numpy as np

    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    return value


def reports_to_json(reports: list[VerificationReport], *, zero_runtime: bool = False) -> str:
    rows = []
    for r in sorted(reports, key=lambda r: r.check_id):
        d = r.to_dict()
        if zero_runtime:
            d["runtime_ms"] = 0
        rows.append(d)
    return json.dumps(rows, indent=2, allow_nan=True)


def reports_from_json(text: str) -> list[VerificationReport]:
    rows = json.loads(text)
    return [VerificationReport(
        check_id=row["check_id"], inputs=row["inputs"], computed=row["computed"],
        residual=row["residual"], tolerance=row["tolerance"], passed=row["pass"],
        provenance=row["provenance"], seed=row["seed"], runtime_ms=row["runtime_ms"],
    ) for row in rows]


def _flatten(report_dict: dict) -> dict:
    flat = {}
    for key in _FIELD_ORDER:
        val = report_dict[key]
        if key in ("inputs", "computed"):
            for sub, subval in val.items():
                if isinstance(subval, (list, dict)):
                    subval = json.dumps(subval)
                flat[f"{key}.{sub}"] = subval
        else:
            flat[key] = val
    return flat


def reports_to_csv(reports: list[VerificationReport], *, zero_runtime: bool = False) -> str:
    rows = []
    for r in sorted(reports, key=lambda r: r.check_id):
        d = r.to_dict()
        if zero_runtime:
            d["runtime_ms"] = 0
        rows.append(_flatten(d))
    base = ["check_id", "residual", "tolerance", "pass", "provenance", "seed", "runtime_ms"]
    extra = sorted({k for row in rows for k in row} - set(base))
    header = base + extra
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=header, restval="")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if v is None else v) for k, v in row.items()})
    return buf.getvalue()


def emit(reports: list[VerificationReport], format: str, path, *,
         zero_runtime: bool = False) -> None:
    """Write reports to path as a JSON array or a flattened CSV table."""
    if format == "json":
        text = reports_to_json(reports, zero_runtime=zero_runtime)
    elif format == "csv":
        text = reports_to_csv(reports, zero_runtime=zero_runtime)
    else:
        raise ValueError(f"unknown format {format!r}; use 'json' or 'csv'")
    with open(path, "w") as fh:
        fh.write(text)
        if not text.endswith("\n"):
            fh.write("\n")
