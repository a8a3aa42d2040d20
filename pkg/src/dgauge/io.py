"""File formats: DGV1 volumes, report JSON/CSV, and summary SVG charts.

All writers are byte-deterministic given identical inputs, which makes
whole-file comparison a valid regression test.  Readers validate
everything and name the offending field; no partially constructed data
escapes a failed read.

DGV1 is a deliberately minimal volume container (ASCII header, raw
little-endian float32 payload) used to ingest externally prepared
ground-truth volumes without pulling in a neuroimaging stack:

    DGV1
    dims: 64 64 64
    voxel_mm: 0.8
    dtype: f32le
    <blank line>
    <x*y*z little-endian float32 values, row-major>
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .core import Tensor
from .errors import FormatError
from .metrics import MetricSummary
from .scenarios import (
    MethodOutcome,
    QuadrantRecord,
    ScenarioReport,
    ScenarioSpec,
)

__all__ = [
    "write_volume",
    "read_volume",
    "write_report",
    "read_report",
    "render_summary_svg",
    "report_to_dict",
    "report_markdown",
    "REPORT_SCHEMA_VERSION",
]

MAGIC = "DGV1"
REPORT_SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# DGV1 volumes


def write_volume(path: str | Path, vol: Tensor, voxel_mm: float) -> None:
    """Write a 3-D Tensor as a DGV1 file (float32 payload; mask not stored)."""
    if vol.ndim != 3:
        raise ValueError(f"DGV1 stores 3-D volumes, got {vol.ndim}-D")
    if not (voxel_mm > 0):
        raise ValueError(f"voxel_mm must be > 0, got {voxel_mm}")
    x, y, z = vol.dims
    header = f"{MAGIC}\ndims: {x} {y} {z}\nvoxel_mm: {voxel_mm!r}\ndtype: f32le\n\n"
    payload = vol.values.astype("<f4").tobytes(order="C")
    Path(path).write_bytes(header.encode("ascii") + payload)


def read_volume(path: str | Path) -> tuple[Tensor, float]:
    """Read and validate a DGV1 file; returns (volume, voxel_mm)."""
    raw = Path(path).read_bytes()
    sep = raw.find(b"\n\n")
    if sep < 0:
        raise FormatError(f"{path}: header not terminated by a blank line")
    try:
        header = raw[:sep].decode("ascii")
    except UnicodeDecodeError as exc:
        raise FormatError(f"{path}: header is not ASCII: {exc}") from None
    lines = header.split("\n")
    if lines[0] != MAGIC:
        raise FormatError(
            f"{path}: bad magic {lines[0][:16]!r}, expected {MAGIC!r}"
        )
    fields = {}
    for line in lines[1:]:
        key, _, value = line.partition(":")
        if not _:
            raise FormatError(f"{path}: malformed header line {line!r}")
        fields[key.strip()] = value.strip()
    for key in ("dims", "voxel_mm", "dtype"):
        if key not in fields:
            raise FormatError(f"{path}: missing header field {key!r}")
    if fields["dtype"] != "f32le":
        raise FormatError(f"{path}: unsupported dtype {fields['dtype']!r}")
    try:
        dims = tuple(int(v) for v in fields["dims"].split())
    except ValueError:
        raise FormatError(f"{path}: unparsable dims {fields['dims']!r}") from None
    if len(dims) != 3 or any(d < 1 for d in dims):
        raise FormatError(f"{path}: dims must be 3 positive integers, got {dims}")
    try:
        voxel_mm = float(fields["voxel_mm"])
    except ValueError:
        raise FormatError(
            f"{path}: unparsable voxel_mm {fields['voxel_mm']!r}"
        ) from None
    if not (voxel_mm > 0) or not math.isfinite(voxel_mm):
        raise FormatError(f"{path}: voxel_mm must be finite and > 0, got {voxel_mm}")
    payload = raw[sep + 2 :]
    expected = 4 * dims[0] * dims[1] * dims[2]
    if len(payload) != expected:
        raise FormatError(
            f"{path}: payload is {len(payload)} bytes, expected {expected}"
        )
    values = np.frombuffer(payload, dtype="<f4").astype(np.float64).reshape(dims)
    if not np.all(np.isfinite(values)):
        raise FormatError(f"{path}: payload contains non-finite values")
    return Tensor(values), voxel_mm


# ---------------------------------------------------------------------------
# Reports

_JSON_NAME = "report.json"
_CSV_NAME = "report.csv"
_SVG_NAME = "report.svg"
_MD_NAME = "report.md"
_QUADRANTS_NAME = "quadrants.json"


def _spec_echo(spec: ScenarioSpec) -> dict:
    methods = None
    if spec.methods:
        methods = [
            e if isinstance(e, str) else [e[0], dict(e[1])] for e in spec.methods
        ]
    return {
        "name": spec.name,
        "seed": spec.seed,
        "m": spec.m,
        "sigma": spec.sigma,
        "noise_width": spec.noise_width,
        "methods": methods,
        "phantom_n": spec.phantom_n,
        "voxel_mm": spec.voxel_mm,
        "baseline_draws": spec.baseline_draws,
    }


def report_to_dict(report: ScenarioReport) -> dict:
    """JSON-ready dict for a report (wall-clock deliberately excluded)."""
    methods = []
    for out in report.outcomes:
        s = out.summary
        methods.append(
            {
                "name": out.name,
                "params": out.params,
                "bias": s.bias,
                "variance": s.variance,
                "variance_std": out.variance_std,
                "error": s.error,
                "skipped_points": s.skipped_points,
            }
        )
    diagnostics = {}
    if report.quadrants is not None:
        diagnostics["quadrants"] = _QUADRANTS_NAME
    for out in report.outcomes:
        if out.diagnostics is not None:
            diagnostics[out.name] = f"diagnostics_{out.name}.csv"
    m = report.spec.m
    if m is None:
        from .scenarios import scenario_defaults

        m = scenario_defaults(report.spec.name)["m"]
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "scenario": report.spec.name,
        "seed": report.spec.seed,
        "m": m,
        "baseline": report.baseline,
        "methods": methods,
        "diagnostics": diagnostics,
        "spec": _spec_echo(report.spec),
    }


def write_report(report: ScenarioReport, out_dir: str | Path) -> dict[str, Path]:
    """Write report.json and report.csv (plus any diagnostics sidecars).

    Returns the paths written, keyed by kind.  The CSV holds one row per
    method with the headline numbers; the JSON is the full record.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}

    json_path = out_dir / _JSON_NAME
    json_path.write_text(json.dumps(report_to_dict(report), indent=2) + "\n")
    paths["json"] = json_path

    csv_path = out_dir / _CSV_NAME
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "bias", "variance", "error"])
        for out in report.outcomes:
            s = out.summary
            writer.writerow([out.name, repr(s.bias), repr(s.variance), repr(s.error)])
    paths["csv"] = csv_path

    if report.quadrants is not None:
        qpath = out_dir / _QUADRANTS_NAME
        qdoc = [
            {
                "mean": q.mean,
                "variance": q.variance,
                "draws": [float(v) for v in q.draws],
                "bias_estimate": q.bias_estimate,
                "variance_estimate": q.variance_estimate,
                "mse": q.mse,
            }
            for q in report.quadrants
        ]
        qpath.write_text(json.dumps(qdoc, indent=2) + "\n")
        paths["quadrants"] = qpath

    for out in report.outcomes:
        if out.diagnostics is None:
            continue
        dpath = out_dir / f"diagnostics_{out.name}.csv"
        with dpath.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["point", "truth", "mean", "se"])
            d = out.diagnostics
            for i in range(d.truth.size):
                writer.writerow([i, repr(d.truth[i]), repr(d.mean[i]), repr(d.se[i])])
        paths[f"diagnostics_{out.name}"] = dpath

    return paths


def read_report(path: str | Path) -> ScenarioReport:
    """Rebuild a ScenarioReport from report.json (diagnostics not reloaded)."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from None
    for key in ("schema_version", "scenario", "seed", "m", "baseline", "methods"):
        if key not in doc:
            raise FormatError(f"{path}: missing field {key!r}")
    if doc["schema_version"] != REPORT_SCHEMA_VERSION:
        raise FormatError(
            f"{path}: unsupported schema_version {doc['schema_version']!r}"
        )
    echo = doc.get("spec", {})
    spec = ScenarioSpec(
        name=doc["scenario"],
        seed=doc["seed"],
        m=echo.get("m"),
        sigma=echo.get("sigma"),
        noise_width=echo.get("noise_width"),
        methods=(
            tuple(
                e if isinstance(e, str) else (e[0], dict(e[1]))
                for e in echo["methods"]
            )
            if echo.get("methods")
            else None
        ),
        phantom_n=echo.get("phantom_n", 64),
        voxel_mm=echo.get("voxel_mm", 0.8),
        baseline_draws=echo.get("baseline_draws", 1_000_000),
    )
    outcomes = []
    for entry in doc["methods"]:
        for key in ("name", "bias", "variance", "variance_std", "error",
                    "skipped_points"):
            if key not in entry:
                raise FormatError(f"{path}: method entry missing {key!r}")
        if not all(
            math.isfinite(entry[k])
            for k in ("bias", "variance", "variance_std", "error")
        ):
            raise FormatError(f"{path}: non-finite number in method {entry['name']!r}")
        outcomes.append(
            MethodOutcome(
                name=entry["name"],
                params=dict(entry.get("params", {})),
                summary=MetricSummary(
                    bias=entry["bias"],
                    variance=entry["variance"],
                    error=entry["error"],
                    skipped_points=entry["skipped_points"],
                    m=doc["m"],
                ),
                variance_std=entry["variance_std"],
            )
        )
    quadrants = None
    qref = doc.get("diagnostics", {}).get("quadrants")
    if qref:
        qfile = path.parent / qref
        if qfile.exists():
            quadrants = tuple(
                QuadrantRecord(
                    mean=q["mean"],
                    variance=q["variance"],
                    draws=np.array(q["draws"]),
                    bias_estimate=q["bias_estimate"],
                    variance_estimate=q["variance_estimate"],
                    mse=q["mse"],
                )
                for q in json.loads(qfile.read_text())
            )
    return ScenarioReport(
        spec=spec,
        baseline=doc["baseline"],
        outcomes=tuple(outcomes),
        quadrants=quadrants,
    )


def report_markdown(report: ScenarioReport) -> str:
    """Markdown summary table, one row per method."""
    lines = [
        f"# Scenario `{report.spec.name}` (seed {report.spec.seed})",
        "",
        f"Unbiased-measurement baseline: {report.baseline:.4f}",
        "",
        "| method | bias | variance | error | skipped |",
        "|---|---|---|---|---|",
    ]
    for out in report.outcomes:
        s = out.summary
        lines.append(
            f"| {out.name} | {s.bias:.4f} | {s.variance:.6g} | {s.error:.4f} "
            f"| {s.skipped_points} |"
        )
    if report.quadrants is not None:
        lines += [
            "",
            "| quadrant mean | quadrant variance | est. bias | est. variance | MSE |",
            "|---|---|---|---|---|",
        ]
        for q in report.quadrants:
            lines.append(
                f"| {q.mean:g} | {q.variance:g} | {q.bias_estimate:.4f} "
                f"| {q.variance_estimate:.4f} | {q.mse:.4f} |"
            )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# SVG summary chart

_PANEL_W = 240
_BAR_H = 16
_BAR_GAP = 8
_LABEL_W = 130
_PANEL_GAP = 34
_TOP = 56
_FONT = "font-family=\"sans-serif\" font-size=\"12\""


def _esc(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def render_summary_svg(report: ScenarioReport, path: str | Path) -> None:
    """Write a three-panel horizontal-bar chart of bias, variance, and error.

    The bias panel carries a vertical rule at the unbiased baseline.  The
    drawing is a pure function of the report's numbers, so regenerating it
    from a written report.json yields identical bytes.
    """
    if not report.outcomes:
        raise ValueError("nothing to render: report has no methods")
    n = len(report.outcomes)
    names = [out.name for out in report.outcomes]
    bias = [out.summary.bias for out in report.outcomes]
    variance = [out.summary.variance for out in report.outcomes]
    error = [out.summary.error for out in report.outcomes]

    height = _TOP + n * (_BAR_H + _BAR_GAP) + 28
    width = _LABEL_W + 3 * _PANEL_W + 3 * _PANEL_GAP

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>\n',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">\n',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>\n',
        f'<text x="{_LABEL_W}" y="20" {_FONT} font-weight="bold">'
        f"Scenario {_esc(report.spec.name)} (m = "
        f"{report_to_dict(report)['m']}, seed {report.spec.seed})</text>\n",
    ]
    panels = [
        ("Bias (SE units)", bias, "#4878a8", True),
        ("Variance (data units)", variance, "#6aa84f", False),
        ("Error (correlation)", error, "#b46ac8", False),
    ]
    for pi, (title, values, color, with_baseline) in enumerate(panels):
        x0 = _LABEL_W + pi * (_PANEL_W + _PANEL_GAP)
        scale_max = max([abs(v) for v in values] + ([report.baseline] if with_baseline else []))
        if scale_max <= 0:
            scale_max = 1.0
        scale = _PANEL_W / (1.1 * scale_max)
        parts.append(f'<text x="{x0}" y="{_TOP - 14}" {_FONT}>{_esc(title)}</text>\n')
        for i, v in enumerate(values):
            y = _TOP + i * (_BAR_H + _BAR_GAP)
            if pi == 0:
                parts.append(
                    f'<text x="{_LABEL_W - 8}" y="{y + 12}" {_FONT} '
                    f'text-anchor="end">{_esc(names[i])}</text>\n'
                )
            w = abs(v) * scale
            parts.append(
                f'<rect class="bar" x="{x0:.2f}" y="{y}" width="{w:.2f}" '
                f'height="{_BAR_H}" fill="{color}"/>\n'
            )
            parts.append(
                f'<text x="{x0 + w + 4:.2f}" y="{y + 12}" {_FONT}>{v:.3f}</text>\n'
            )
        if with_baseline:
            bx = x0 + report.baseline * scale
            y1 = _TOP - 6
            y2 = _TOP + n * (_BAR_H + _BAR_GAP) - _BAR_GAP + 6
            parts.append(
                f'<line id="bias-baseline" x1="{bx:.2f}" y1="{y1}" x2="{bx:.2f}" '
                f'y2="{y2}" stroke="#888888" stroke-width="1.5" '
                f'stroke-dasharray="4 3"/>\n'
            )
            parts.append(
                f'<text x="{bx + 3:.2f}" y="{y2 + 14}" {_FONT} fill="#666666">'
                f"baseline {report.baseline:.3f}</text>\n"
            )
        axis_y = _TOP + n * (_BAR_H + _BAR_GAP) - _BAR_GAP + 6
        parts.append(
            f'<line x1="{x0}" y1="{axis_y}" x2="{x0 + _PANEL_W}" y2="{axis_y}" '
            f'stroke="#333333" stroke-width="1"/>\n'
        )
    parts.append("</svg>\n")
    Path(path).write_text("".join(parts))
