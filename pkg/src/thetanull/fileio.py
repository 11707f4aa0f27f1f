"""JSON input documents for period matrices and JSON/text report rendering."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import __version__
from .errors import DimensionMismatch, ParseError
from .schottky import NullCandidate, SchottkyReport
from .siegel import DEFAULT_SYM_TOL, PeriodMatrix, validate_period_matrix

_FIELDS = {"g", "re", "im", "label"}
_REQUIRED = ("g", "re", "im")


@dataclass(frozen=True, eq=False)
class InputDocument:
    g: int
    re: np.ndarray
    im: np.ndarray
    label: str | None = None

    def period_matrix(self, sym_tol: float = DEFAULT_SYM_TOL) -> PeriodMatrix:
        return validate_period_matrix(self.re + 1j * self.im, sym_tol)


def _matrix(value, name: str, g: int) -> np.ndarray:
    if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
        raise ParseError(f"field {name!r}: expected a list of rows")
    if len(value) != g or any(len(r) != g for r in value):
        shape = (len(value), ",".join(str(len(r)) for r in value))
        raise DimensionMismatch(f"field {name!r}: expected {g}x{g}, got rows/cols {shape}")
    for i, row in enumerate(value):
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise ParseError(f"field {name!r}[{i}][{j}]: expected a number, got {x!r}")
    return np.array(value, dtype=float)


def parse_period_matrix(text: str) -> InputDocument:
    """Strict parse of ``{"g": .., "re": [[..]], "im": [[..]], "label": ..}``."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ParseError("top level must be a JSON object")
    unknown = sorted(set(data) - _FIELDS)
    if unknown:
        raise ParseError(f"unknown field(s): {', '.join(unknown)}")
    for key in _REQUIRED:
        if key not in data:
            raise ParseError(f"missing field {key!r}")
    g = data["g"]
    if isinstance(g, bool) or not isinstance(g, int) or g < 1:
        raise ParseError(f"field 'g': expected a positive integer, got {g!r}")
    label = data.get("label")
    if label is not None and not isinstance(label, str):
        raise ParseError("field 'label': expected a string")
    return InputDocument(g, _matrix(data["re"], "re", g), _matrix(data["im"], "im", g), label)


def serialize_period_matrix(doc: InputDocument) -> str:
    data = {"g": doc.g, "re": doc.re.tolist(), "im": doc.im.tolist()}
    if doc.label is not None:
        data["label"] = doc.label
    return json.dumps(data, indent=1)


def document_from_tau(tau: PeriodMatrix, label: str | None = None) -> InputDocument:
    return InputDocument(tau.g, tau.real.copy(), tau.imag.copy(), label)


def complex_json(z) -> dict:
    """Complex scalars and arrays as {"re": .., "im": ..}."""
    a = np.asarray(z)
    return {"re": np.real(a).tolist(), "im": np.imag(a).tolist()}


def _candidate_record(c: NullCandidate) -> dict:
    return {
        "hessian": complex_json(c.hessian),
        "hessian_error": c.hessian_error,
        "singular_values": c.singular_values.tolist(),
        "eigenvalues": complex_json(c.eigenvalues),
        "rank": c.numerical_rank,
    }


def report_document(report: SchottkyReport, label: str | None = None,
                    timing: float | None = None) -> dict:
    """The machine-readable report; key order and float formatting are fixed."""
    candidates = {c.m: c for c in report.candidates}
    records = []
    for m, ev in report.constants.items():
        rec = {
            "characteristic": str(m),
            "abs_theta": abs(ev.value),
            "relative": abs(ev.value) / report.theta_scale,
            "error_bound": ev.error_bound,
            "vanishing": m in candidates,
        }
        if m in candidates:
            rec.update(_candidate_record(candidates[m]))
        records.append(rec)
    tol = report.tolerances
    doc = {
        "tool": "thetanull",
        "version": __version__,
        "label": label,
        "g": report.g,
        "tolerances": {
            "tol_vanish": tol.tol_vanish,
            "tol_rank": tol.tol_rank,
            "target_value": tol.target_value,
            "target_deriv": tol.target_deriv,
        },
        "theta_scale": report.theta_scale,
        "vanishing": [str(c.m) for c in report.candidates],
        "characteristics": records,
        "min_stratum": report.min_stratum,
        "verdict": report.verdict.value,
    }
    if timing is not None:
        doc["timing_seconds"] = timing
    return doc


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=False)


def _fmt(z: complex) -> str:
    z = complex(z)
    sign = "-" if z.imag < 0 else "+"
    return f"{z.real:.6g}{sign}{abs(z.imag):.6g}i"


def _matrix_text(a: np.ndarray) -> list[str]:
    cells = [[_fmt(x) for x in row] for row in a]
    width = max(len(c) for row in cells for c in row)
    return ["  " + "  ".join(c.rjust(width) for c in row) for row in cells]


def report_text(report: SchottkyReport, label: str | None = None) -> str:
    lines = []
    if label:
        lines.append(f"input: {label}")
    lines.append(f"genus {report.g}; largest even theta constant {report.theta_scale:.6g}")
    if not report.candidates:
        lines.append("no even theta constant vanishes")
    for c in report.candidates:
        eps, delta = c.m.epsilon, c.m.delta
        lines.append("")
        lines.append("theta constant with even characteristic")
        lines.append("  [" + " ".join(map(str, eps)) + "]")
        lines.append("  [" + " ".join(map(str, delta)) + "]")
        lines.append(
            f"vanishes: |theta| = {abs(c.theta_value):.3e} "
            f"(relative {abs(c.theta_value) / c.theta_scale:.3e})"
        )
        lines.append("Hessian matrix")
        lines.extend(_matrix_text(c.hessian))
        lines.append("eigenvalues")
        lines.extend("  " + repr(complex(e)) for e in c.eigenvalues)
        lines.append("singular values")
        lines.append("  " + "  ".join(f"{s:.6e}" for s in c.singular_values))
        lines.append(f"numerical rank {c.numerical_rank}")
    lines.append("")
    lines.append(f"min stratum h = {report.min_stratum}")
    lines.append(f"verdict {report.verdict.value}")
    return "\n".join(lines)
